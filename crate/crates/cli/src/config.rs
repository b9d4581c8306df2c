//! Run configuration: a TOML file of `[section]` blocks with `key = value`
//! lines, overlaid by `--set section.key=value` flags.

use std::collections::BTreeSet;
use std::path::Path;

use superradiance::pressure::DEFAULT_THRESHOLD_MBAR;
use superradiance::units::{
    dipole_debye_to_si, wavelength_to_angular_frequency, M_PER_MM, M_PER_NM, M_PER_UM, S_PER_PS,
    W_M2_PER_W_CM2,
};
use superradiance::{
    calibrate_density_scale, density_from_pressure, DensityCalibration, DephasingParameters,
    FitOptions, ScanSettings, SeedPulse, TwoLevelMedium,
};
use toml::{Table, Value};

use crate::error::{CliError, Result};

const SCHEMA: &[(&str, &[&str])] = &[
    ("medium", &["lambda_nm", "mu_D", "w0", "L_mm", "radius_um", "pressure_mbar"]),
    ("seed", &["I_seed_MW_cm2", "E0_V_m", "tau_s_ps", "tau_r_over_tau_s"]),
    ("calibration", &["anchor_p_mbar", "anchor_tau_W_ps", "p0_mbar", "T_K"]),
    ("dephasing", &["sigma_cm2", "v_e_cm_s", "ionization_fraction", "validity_threshold"]),
    (
        "numerics",
        &["dt_over_tau_s", "window_tau_W", "profile_step_tau_W", "pendulum_step_tau_W", "fit_tol", "fit_max_iter"],
    ),
    ("regimes", &["offset_tau_W", "span_tau_W"]),
    ("scan", &["pressures"]),
    ("validate", &["mu0_scale"]),
    ("output", &["dir"]),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedStrength {
    /// Peak intensity, MW/cm².
    Intensity(f64),
    /// Peak field, V/m.
    Field(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda_nm: f64,
    pub mu_debye: f64,
    pub w0: f64,
    pub length_mm: f64,
    pub radius_um: f64,
    pub pressure_mbar: f64,

    pub seed: SeedStrength,
    pub tau_s_ps: f64,
    pub tau_r_over_tau_s: f64,

    pub anchor_p_mbar: f64,
    pub anchor_tau_w_ps: f64,
    pub p0_mbar: f64,
    pub temperature_k: f64,

    pub sigma_cm2: f64,
    pub v_e_cm_s: f64,
    pub ionization_fraction: f64,
    pub validity_threshold: f64,

    pub dt_over_tau_s: f64,
    pub window_tau_w: f64,
    pub profile_step_tau_w: f64,
    pub pendulum_step_tau_w: f64,
    pub fit_tol: f64,
    pub fit_max_iter: usize,

    pub regime_offset_tau_w: f64,
    pub regime_span_tau_w: f64,

    pub pressures: Vec<f64>,

    /// Multiplies μ0 inside `validate` only.
    pub mu0_scale: f64,

    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda_nm: 391.0,
            mu_debye: 1.7,
            w0: 0.1,
            length_mm: 10.0,
            radius_um: 50.0,
            pressure_mbar: 8.0,
            seed: SeedStrength::Intensity(10.0),
            tau_s_ps: 0.26,
            tau_r_over_tau_s: 3.6,
            anchor_p_mbar: 8.0,
            anchor_tau_w_ps: 1.666,
            p0_mbar: DEFAULT_THRESHOLD_MBAR,
            temperature_k: 300.0,
            sigma_cm2: 1e-15,
            v_e_cm_s: 1e8,
            ionization_fraction: 0.1,
            validity_threshold: 10.0,
            dt_over_tau_s: 5e-4,
            window_tau_w: 20.0,
            profile_step_tau_w: 0.01,
            pendulum_step_tau_w: 0.01,
            fit_tol: 1e-8,
            fit_max_iter: 200,
            regime_offset_tau_w: 2.0,
            regime_span_tau_w: 10.0,
            pressures: vec![6.0, 7.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0],
            mu0_scale: 1.0,
            output_dir: "out".into(),
        }
    }
}

/// Raw values plus enough bookkeeping to point diagnostics at their source.
struct Source {
    table: Table,
    text: String,
    origin: String,
    overridden: BTreeSet<String>,
}

impl Source {
    fn locate(&self, section: &str, key: &str) -> String {
        let full = format!("{section}.{key}");
        if self.overridden.contains(&full) {
            return format!("--set {full}");
        }
        match key_line(&self.text, section, key) {
            Some(n) => format!("{}:{n}: {full}", self.origin),
            None => format!("{}: {full}", self.origin),
        }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    fn num(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => as_f64(v).ok_or_else(|| {
                CliError::Config(format!("{}: expected a number, found {}", self.locate(section, key), v.type_str()))
            }),
        }
    }

    fn positive(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        let v = self.num(section, key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("{}: {v} must be positive", self.locate(section, key))));
        }
        Ok(v)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// 1-based line of `key` inside `[section]`.
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == section {
            if let Some((k, _)) = l.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn section_at(text: &str, line: usize) -> Option<String> {
    text.lines()
        .take(line)
        .filter_map(|l| {
            let l = l.trim();
            l.strip_prefix('[').and_then(|r| r.strip_suffix(']')).map(|s| s.trim().to_string())
        })
        .last()
}

fn syntax_error(text: &str, origin: &str, err: toml::de::Error) -> CliError {
    let Some(span) = err.span() else {
        return CliError::Config(format!("{origin}: {}", err.message()));
    };
    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
    let src = text.lines().nth(line - 1).unwrap_or("");
    let body = src.split('#').next().unwrap_or("");
    if let Some((k, v)) = body.split_once('=') {
        let key = k.trim();
        let full = match section_at(text, line) {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        };
        if v.trim().is_empty() {
            return CliError::Config(format!("{origin}:{line}: {full}: missing value"));
        }
        return CliError::Config(format!("{origin}:{line}: {full}: {}", err.message().trim()));
    }
    CliError::Config(format!("{origin}:{line}: {}", err.message().trim()))
}

fn parse_override(text: &str) -> Result<(String, String, Value)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set {text}: expected section.key=value")))?;
    let key = key.trim();
    let (section, name) = key
        .split_once('.')
        .ok_or_else(|| CliError::Usage(format!("--set {key}: expected section.key")))?;
    let value = value.trim();
    if value.is_empty() {
        return Err(CliError::Config(format!("--set {key}: missing value")));
    }
    let parsed = format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    Ok((section.to_string(), name.to_string(), parsed))
}

fn check_schema(table: &Table, text: &str, origin: &str) -> Result<()> {
    for (section, body) in table {
        let Some(known) = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k) else {
            let line = text
                .lines()
                .position(|l| l.trim().trim_start_matches('[').trim_end_matches(']').trim() == section)
                .map(|i| format!(":{}", i + 1))
                .unwrap_or_default();
            return Err(CliError::Config(format!("{origin}{line}: unknown section or key `{section}`")));
        };
        let Some(body) = body.as_table() else {
            return Err(CliError::Config(format!("{origin}: `{section}` must be a [section]")));
        };
        for key in body.keys() {
            if !known.contains(&key.as_str()) {
                let line = key_line(text, section, key).map(|n| format!(":{n}")).unwrap_or_default();
                return Err(CliError::Config(format!(
                    "{origin}{line}: unknown key `{section}.{key}` (expected one of: {})",
                    known.join(", ")
                )));
            }
        }
    }
    Ok(())
}

impl RunConfig {
    /// Reads `path` (defaults only when `None`) and applies `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let (text, origin) = match path {
            Some(p) => (
                std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
                p.display().to_string(),
            ),
            None => (String::new(), "<defaults>".to_string()),
        };
        Self::from_text(&text, &origin, overrides)
    }

    pub fn from_text(text: &str, origin: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table = text.parse().map_err(|e| syntax_error(text, origin, e))?;
        check_schema(&table, text, origin)?;

        let mut overridden = BTreeSet::new();
        for o in overrides {
            let (section, key, value) = parse_override(o)?;
            let known = SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k);
            if !known.is_some_and(|k| k.contains(&key.as_str())) {
                return Err(CliError::Usage(format!("--set {section}.{key}: unknown key")));
            }
            table
                .entry(section.clone())
                .or_insert_with(|| Value::Table(Table::new()))
                .as_table_mut()
                .expect("schema-checked section")
                .insert(key.clone(), value);
            overridden.insert(format!("{section}.{key}"));
        }

        let src = Source {
            table,
            text: text.to_string(),
            origin: origin.to_string(),
            overridden,
        };
        Self::resolve(&src)
    }

    fn resolve(src: &Source) -> Result<Self> {
        let d = Self::default();

        let seed = match (src.raw("seed", "I_seed_MW_cm2"), src.raw("seed", "E0_V_m")) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(format!(
                    "{}: set either seed.I_seed_MW_cm2 or seed.E0_V_m, not both",
                    src.locate("seed", "E0_V_m")
                )))
            }
            (None, Some(_)) => SeedStrength::Field(src.num("seed", "E0_V_m", 0.0)?),
            (Some(_), None) => SeedStrength::Intensity(src.num("seed", "I_seed_MW_cm2", 0.0)?),
            (None, None) => d.seed,
        };
        let (v, key) = match seed {
            SeedStrength::Intensity(v) => (v, "I_seed_MW_cm2"),
            SeedStrength::Field(v) => (v, "E0_V_m"),
        };
        if !(v >= 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("{}: {v} must be non-negative", src.locate("seed", key))));
        }

        let pressures = match src.raw("scan", "pressures") {
            None => d.pressures.clone(),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for v in items {
                    out.push(as_f64(v).ok_or_else(|| {
                        CliError::Config(format!("{}: entries must be numbers", src.locate("scan", "pressures")))
                    })?);
                }
                out
            }
            Some(v) => match as_f64(v) {
                Some(p) => vec![p],
                None => {
                    return Err(CliError::Config(format!(
                        "{}: expected a list of pressures",
                        src.locate("scan", "pressures")
                    )))
                }
            },
        };

        let fit_max_iter = match src.raw("numerics", "fit_max_iter") {
            None => d.fit_max_iter,
            Some(Value::Integer(n)) if *n >= 1 => *n as usize,
            Some(_) => {
                return Err(CliError::Config(format!(
                    "{}: expected a positive integer",
                    src.locate("numerics", "fit_max_iter")
                )))
            }
        };

        let output_dir = match src.raw("output", "dir") {
            None => d.output_dir.clone(),
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(_) => {
                return Err(CliError::Config(format!("{}: expected a directory path", src.locate("output", "dir"))))
            }
        };

        let cfg = Self {
            lambda_nm: src.positive("medium", "lambda_nm", d.lambda_nm)?,
            mu_debye: src.positive("medium", "mu_D", d.mu_debye)?,
            w0: src.num("medium", "w0", d.w0)?,
            length_mm: src.positive("medium", "L_mm", d.length_mm)?,
            radius_um: src.positive("medium", "radius_um", d.radius_um)?,
            pressure_mbar: src.positive("medium", "pressure_mbar", d.pressure_mbar)?,
            seed,
            tau_s_ps: src.positive("seed", "tau_s_ps", d.tau_s_ps)?,
            tau_r_over_tau_s: src.positive("seed", "tau_r_over_tau_s", d.tau_r_over_tau_s)?,
            anchor_p_mbar: src.positive("calibration", "anchor_p_mbar", d.anchor_p_mbar)?,
            anchor_tau_w_ps: src.positive("calibration", "anchor_tau_W_ps", d.anchor_tau_w_ps)?,
            p0_mbar: src.num("calibration", "p0_mbar", d.p0_mbar)?,
            temperature_k: src.positive("calibration", "T_K", d.temperature_k)?,
            sigma_cm2: src.positive("dephasing", "sigma_cm2", d.sigma_cm2)?,
            v_e_cm_s: src.positive("dephasing", "v_e_cm_s", d.v_e_cm_s)?,
            ionization_fraction: src.positive("dephasing", "ionization_fraction", d.ionization_fraction)?,
            validity_threshold: src.positive("dephasing", "validity_threshold", d.validity_threshold)?,
            dt_over_tau_s: src.positive("numerics", "dt_over_tau_s", d.dt_over_tau_s)?,
            window_tau_w: src.positive("numerics", "window_tau_W", d.window_tau_w)?,
            profile_step_tau_w: src.positive("numerics", "profile_step_tau_W", d.profile_step_tau_w)?,
            pendulum_step_tau_w: src.positive("numerics", "pendulum_step_tau_W", d.pendulum_step_tau_w)?,
            fit_tol: src.positive("numerics", "fit_tol", d.fit_tol)?,
            fit_max_iter,
            regime_offset_tau_w: src.positive("regimes", "offset_tau_W", d.regime_offset_tau_w)?,
            regime_span_tau_w: src.positive("regimes", "span_tau_W", d.regime_span_tau_w)?,
            pressures,
            mu0_scale: src.positive("validate", "mu0_scale", d.mu0_scale)?,
            output_dir,
        };

        // Cross-field and type-level checks, reported against the field.
        let at = |s: &str, k: &str, e: String| CliError::Config(format!("{}: {e}", src.locate(s, k)));
        if cfg.w0.abs() > 1.0 {
            return Err(at("medium", "w0", format!("{} must lie in [-1, 1]", cfg.w0)));
        }
        if cfg.ionization_fraction > 1.0 {
            return Err(at("dephasing", "ionization_fraction", format!("{} must not exceed 1", cfg.ionization_fraction)));
        }
        if !(cfg.p0_mbar >= 0.0) {
            return Err(at("calibration", "p0_mbar", format!("{} must be non-negative", cfg.p0_mbar)));
        }
        if cfg.anchor_p_mbar <= cfg.p0_mbar {
            return Err(at(
                "calibration",
                "anchor_p_mbar",
                format!("{} mbar must exceed p0 = {} mbar", cfg.anchor_p_mbar, cfg.p0_mbar),
            ));
        }
        if cfg.pressure_mbar <= cfg.p0_mbar {
            return Err(at(
                "medium",
                "pressure_mbar",
                format!("{} mbar must exceed p0 = {} mbar", cfg.pressure_mbar, cfg.p0_mbar),
            ));
        }
        if cfg.dt_over_tau_s >= cfg.tau_r_over_tau_s {
            return Err(at("numerics", "dt_over_tau_s", "step must be shorter than tau_r".into()));
        }
        if cfg.pendulum_step_tau_w >= cfg.regime_span_tau_w {
            return Err(at("numerics", "pendulum_step_tau_W", "step must be shorter than regimes.span_tau_W".into()));
        }
        if cfg.pressures.is_empty() {
            return Err(at("scan", "pressures", "list is empty".into()));
        }
        Ok(cfg)
    }

    /// Output directory: `--out` wins over `output.dir`.
    pub fn out_dir(&self, flag: Option<&Path>) -> std::path::PathBuf {
        flag.map(Path::to_path_buf).unwrap_or_else(|| self.output_dir.clone().into())
    }

    pub fn tau_s(&self) -> f64 {
        self.tau_s_ps * S_PER_PS
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r_over_tau_s * self.tau_s()
    }

    pub fn dt(&self) -> f64 {
        self.dt_over_tau_s * self.tau_s()
    }

    pub fn seed_pulse(&self) -> Result<SeedPulse> {
        Ok(match self.seed {
            SeedStrength::Intensity(i) => SeedPulse::from_intensity(i * 1e6 * W_M2_PER_W_CM2, self.tau_s(), self.tau_r())?,
            SeedStrength::Field(e) => SeedPulse::new(e, self.tau_s(), self.tau_r())?,
        })
    }

    /// Medium with zero density; the calibration fills `N` in per pressure.
    pub fn template(&self) -> Result<TwoLevelMedium> {
        Ok(TwoLevelMedium::new(
            wavelength_to_angular_frequency(self.lambda_nm * M_PER_NM)?,
            dipole_debye_to_si(self.mu_debye)?,
            0.0,
            self.length_mm * M_PER_MM,
            self.w0,
        )?)
    }

    pub fn calibration(&self) -> Result<DensityCalibration> {
        Ok(calibrate_density_scale(
            self.anchor_p_mbar,
            self.anchor_tau_w_ps * S_PER_PS,
            self.p0_mbar,
            &self.template()?,
        )?)
    }

    pub fn medium_at(&self, p: f64) -> Result<TwoLevelMedium> {
        let n = density_from_pressure(&self.calibration()?, p)?;
        Ok(self.template()?.with_density(n)?)
    }

    pub fn dephasing(&self) -> Result<DephasingParameters> {
        // cm² → m², cm/s → m/s
        Ok(DephasingParameters::new(
            self.sigma_cm2 * 1e-4,
            self.v_e_cm_s * 1e-2,
            self.ionization_fraction,
            self.temperature_k,
        )?)
    }

    pub fn scan_settings(&self) -> Result<ScanSettings> {
        Ok(ScanSettings {
            radius: self.radius_um * M_PER_UM,
            dephasing: self.dephasing()?,
            validity_threshold: self.validity_threshold,
            dt: Some(self.dt()),
        })
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            tolerance: self.fit_tol,
            max_iterations: self.fit_max_iter,
            ..FitOptions::default()
        }
    }

    /// The resolved configuration as a loadable TOML document.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        let mut put = |section: &str, key: &str, v: Value| {
            root.entry(section.to_string())
                .or_insert_with(|| Value::Table(Table::new()))
                .as_table_mut()
                .expect("section")
                .insert(key.to_string(), v);
        };
        let f = Value::Float;
        put("medium", "lambda_nm", f(self.lambda_nm));
        put("medium", "mu_D", f(self.mu_debye));
        put("medium", "w0", f(self.w0));
        put("medium", "L_mm", f(self.length_mm));
        put("medium", "radius_um", f(self.radius_um));
        put("medium", "pressure_mbar", f(self.pressure_mbar));
        match self.seed {
            SeedStrength::Intensity(i) => put("seed", "I_seed_MW_cm2", f(i)),
            SeedStrength::Field(e) => put("seed", "E0_V_m", f(e)),
        }
        put("seed", "tau_s_ps", f(self.tau_s_ps));
        put("seed", "tau_r_over_tau_s", f(self.tau_r_over_tau_s));
        put("calibration", "anchor_p_mbar", f(self.anchor_p_mbar));
        put("calibration", "anchor_tau_W_ps", f(self.anchor_tau_w_ps));
        put("calibration", "p0_mbar", f(self.p0_mbar));
        put("calibration", "T_K", f(self.temperature_k));
        put("dephasing", "sigma_cm2", f(self.sigma_cm2));
        put("dephasing", "v_e_cm_s", f(self.v_e_cm_s));
        put("dephasing", "ionization_fraction", f(self.ionization_fraction));
        put("dephasing", "validity_threshold", f(self.validity_threshold));
        put("numerics", "dt_over_tau_s", f(self.dt_over_tau_s));
        put("numerics", "window_tau_W", f(self.window_tau_w));
        put("numerics", "profile_step_tau_W", f(self.profile_step_tau_w));
        put("numerics", "pendulum_step_tau_W", f(self.pendulum_step_tau_w));
        put("numerics", "fit_tol", f(self.fit_tol));
        put("numerics", "fit_max_iter", Value::Integer(self.fit_max_iter as i64));
        put("regimes", "offset_tau_W", f(self.regime_offset_tau_w));
        put("regimes", "span_tau_W", f(self.regime_span_tau_w));
        put("scan", "pressures", Value::Array(self.pressures.iter().map(|&p| f(p)).collect()));
        put("validate", "mu0_scale", f(self.mu0_scale));
        put("output", "dir", Value::String(self.output_dir.clone()));
        toml::to_string(&root).expect("plain tables serialize")
    }
}
