use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use superradiance::ode::simpson;
use superradiance::pressure::QUOTED_DENSITY_SCALE_CM3;
use superradiance::seed::{
    bloch_angle_with_step, default_step, integrate_bloch_with, peak_rabi_frequency, pulse_area,
    state_from_angle,
};
use superradiance::superradiant::{
    characteristic_duration_from_decay_time, characteristic_duration_with, sech2_fwhm_factor,
};
use superradiance::units::{s_to_ps, PER_M3_PER_CM3, W_M2_PER_W_CM2};
use superradiance::{
    characteristic_duration, classify_regime, compare_to_sech2, dephasing_time, extract_fwhm,
    extract_peak_delay, fit_sech2_with, integrate_bloch_rwa, integrate_pendulum, pressure_scan,
    superradiance_valid, table1_pipeline, tau_w_from_fwhm, PhysicalConstants,
    SuperradianceSolution, TemporalTrace,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{fmt_f64, fmt_opt, read_trace, write_text, Csv};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn seed_phase(cfg: &RunConfig, out: &Path) -> Result<String> {
    let pulse = cfg.seed_pulse()?;
    let medium = cfg.medium_at(cfg.pressure_mbar)?;
    let traj = integrate_bloch_rwa(&pulse, &medium, pulse.tau_r, cfg.dt())?;

    let mut csv = Csv::create(out.join("seed_trajectory.csv"), &["t_ps", "u", "v", "w", "theta_rad"])?;
    for (s, th) in traj.samples.iter().zip(&traj.theta) {
        csv.numbers(&[s_to_ps(s.t), s.u, s.v, s.w, *th])?;
    }
    csv.finish()?;

    let theta = bloch_angle_with_step(&pulse, &medium, pulse.tau_r, cfg.dt())?;
    let end = traj.last();
    let mut summary = vec![
        ("E0_V_m", fmt_f64(pulse.e0)),
        ("peak_rabi_rad_s", fmt_f64(peak_rabi_frequency(&pulse, &medium))),
        ("tau_r_ps", fmt_f64(s_to_ps(pulse.tau_r))),
        ("theta_r_rad", fmt_f64(theta)),
        ("theta_r_over_pi", fmt_f64(theta / PI)),
        ("theta_r_rk4_rad", fmt_f64(traj.final_theta())),
        ("v_tau_r", fmt_f64(end.v)),
        ("w_tau_r", fmt_f64(end.w)),
    ];

    if theta > 0.0 && theta < PI {
        let sol = SuperradianceSolution::new(medium, theta, pulse.tau_r)?;
        summary.push(("pressure_mbar", fmt_f64(cfg.pressure_mbar)));
        summary.push(("tau_W_ps", fmt_f64(s_to_ps(sol.tau_w))));
        summary.push(("tau_D_ps", fmt_f64(s_to_ps(sol.tau_d))));
        summary.push(("regime", sol.regime.map(|r| r.number().to_string()).unwrap_or_default()));
        write_profile(cfg, &sol, &out.join("profile.csv"))?;
    } else {
        eprintln!("warning: θ(τ_r) = {theta} rad leaves no superradiant burst; profile.csv not written");
    }

    let text: String = summary.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    write_text(&out.join("seed_summary.txt"), &text)?;
    Ok(text)
}

fn write_profile(cfg: &RunConfig, sol: &SuperradianceSolution, path: &Path) -> Result<()> {
    let (a, _) = sol.window(cfg.window_tau_w);
    let n = (2.0 * cfg.window_tau_w / cfg.profile_step_tau_w).round() as usize;
    let h = 2.0 * cfg.window_tau_w * sol.tau_w / n as f64;
    let mut csv = Csv::create(
        path.to_path_buf(),
        &["t_ps", "theta_rad", "energy_density_J_m3", "power_W_m3", "intensity_W_m2", "field_V_m"],
    )?;
    for i in 0..=n {
        let t = a + i as f64 * h;
        csv.numbers(&[
            s_to_ps(t),
            sol.bloch_angle(t),
            sol.energy_density(t),
            sol.power_density(t),
            sol.intensity(t),
            sol.field_envelope(t),
        ])?;
    }
    csv.finish()
}

pub fn regimes(cfg: &RunConfig, out: &Path) -> Result<String> {
    let base = cfg.medium_at(cfg.pressure_mbar)?;
    let tau_w = characteristic_duration(&base)?;
    let weak = 2.0 * (-cfg.regime_offset_tau_w).exp().atan();
    let w0 = cfg.w0.abs();
    let cases = [(w0, weak), (w0, PI - weak), (-w0, weak), (-w0, PI - weak)];

    let mut report = String::new();
    for (w, theta_r) in cases {
        let regime = classify_regime(w, theta_r)?;
        let medium = base.with_w0(w)?;
        let dt = cfg.pendulum_step_tau_w * tau_w;
        let traj = integrate_pendulum(theta_r, cfg.tau_r(), &medium, cfg.tau_r() + cfg.regime_span_tau_w * tau_w, dt)?;
        let name = format!("regime{}.csv", regime.number());
        let mut csv = Csv::create(out.join(&name), &["s", "t_ps", "theta_rad", "w", "p_over_p0"])?;
        for (i, &(t, th)) in traj.iter().enumerate() {
            let s = i as f64 * cfg.pendulum_step_tau_w;
            csv.numbers(&[s, s_to_ps(t), th, w * th.cos(), th.sin().powi(2)])?;
        }
        csv.finish()?;
        let sol = SuperradianceSolution::new(medium, theta_r, cfg.tau_r())?;
        report.push_str(&format!(
            "{name}: w0 = {}, theta_r = {} rad, tau_D - tau_r = {} tau_W, {}\n",
            fmt_f64(w),
            fmt_f64(theta_r),
            fmt_f64((sol.tau_d - cfg.tau_r()) / tau_w),
            if regime.delayed_peak() { "delayed peak" } else { "declines from onset" }
        ));
    }
    write_text(&out.join("regimes_summary.txt"), &report)?;
    Ok(report)
}

fn check_pressures(cfg: &RunConfig, pressures: &[f64]) -> Result<()> {
    if pressures.is_empty() {
        return Err(CliError::Config("no pressures to scan".into()));
    }
    if let Some(p) = pressures.iter().find(|&&p| !(p > cfg.p0_mbar)) {
        return Err(CliError::Config(format!(
            "pressure {p} mbar is at or below the threshold p0 = {} mbar",
            cfg.p0_mbar
        )));
    }
    Ok(())
}

pub fn scan(cfg: &RunConfig, pressures: &[f64], out: &Path) -> Result<String> {
    check_pressures(cfg, pressures)?;
    let cal = cfg.calibration()?;
    let rows = pressure_scan(&cal, &cfg.seed_pulse()?, &cfg.template()?, pressures, &cfg.scan_settings()?)?;
    let mut csv = Csv::create(
        out.join("scan.csv"),
        &[
            "p_mbar",
            "N_per_cm3",
            "tau_W_ps",
            "tau_D_ps",
            "theta_r_rad",
            "I_peak_W_cm2",
            "I_peak_norm",
            "E_total_J",
            "E_total_norm",
            "E_total_integral_J",
            "dephasing_ps",
            "validity_margin",
        ],
    )?;
    for r in &rows {
        csv.numbers(&[
            r.pressure,
            r.density / PER_M3_PER_CM3,
            s_to_ps(r.tau_w),
            s_to_ps(r.tau_d),
            r.theta_r,
            r.i_peak / W_M2_PER_W_CM2,
            r.i_peak_norm,
            r.e_total,
            r.e_total_norm,
            r.e_total_integral,
            s_to_ps(r.dephasing_time),
            r.validity.margin,
        ])?;
    }
    csv.finish()?;
    let invalid: Vec<String> = rows.iter().filter(|r| !r.validity.valid).map(|r| fmt_f64(r.pressure)).collect();
    if !invalid.is_empty() {
        eprintln!("warning: validity margin below {} at p = {} mbar", cfg.validity_threshold, invalid.join(", "));
    }
    Ok(format!(
        "density scale k = {} cm^-3/mbar (computed from the anchor), published {} cm^-3/mbar\n{} rows written to scan.csv\n",
        fmt_f64(cal.k_per_cm3()),
        fmt_f64(QUOTED_DENSITY_SCALE_CM3),
        rows.len()
    ))
}

fn unique_name(stem: &str, taken: &mut Vec<String>) -> String {
    let mut name = format!("comparison_{stem}.csv");
    let mut k = 2;
    while taken.contains(&name) {
        name = format!("comparison_{stem}_{k}.csv");
        k += 1;
    }
    taken.push(name.clone());
    name
}

pub fn fit(cfg: &RunConfig, files: &[PathBuf], out: &Path) -> Result<String> {
    if files.is_empty() {
        return Err(CliError::Usage("fit needs at least one trace file".into()));
    }
    let traces = files.iter().map(|f| read_trace(f)).collect::<Result<Vec<TemporalTrace>>>()?;
    let opts = cfg.fit_options();

    let mut fits = Csv::create(
        out.join("fits.csv"),
        &[
            "file",
            "label",
            "pressure_mbar",
            "amplitude",
            "tau_D_ps",
            "tau_W_ps",
            "rms_residual",
            "main_lobe_rms",
            "converged",
            "iterations",
            "comparison_file",
        ],
    )?;
    let mut taken = Vec::new();
    let mut report = String::new();
    for (file, tr) in files.iter().zip(&traces) {
        if tr.pressure.is_none() {
            eprintln!("warning: {}: no `# pressure_mbar=` line; pressure left blank", file.display());
        }
        let f = fit_sech2_with(tr, None, &opts)?;
        if !f.converged {
            eprintln!("warning: {}: sech² fit did not converge after {} iterations", file.display(), f.iterations);
        }
        let name = unique_name(&tr.label, &mut taken);
        let (lobe, cmp_name) = if f.converged {
            let c = compare_to_sech2(tr, f.tau_d, f.tau_w)?;
            let mut csv = Csv::create(out.join(&name), &["t_ps", "measured_norm", "fit_norm", "residual"])?;
            for r in &c.rows {
                csv.numbers(&[s_to_ps(r.t), r.measured, r.model, r.residual])?;
            }
            csv.finish()?;
            (Some(c.main_lobe_rms), name)
        } else {
            (None, String::new())
        };
        fits.record([
            file.display().to_string(),
            tr.label.clone(),
            fmt_opt(tr.pressure),
            fmt_f64(f.amplitude),
            fmt_f64(s_to_ps(f.tau_d)),
            fmt_f64(s_to_ps(f.tau_w)),
            fmt_f64(f.rms_residual),
            fmt_opt(lobe),
            f.converged.to_string(),
            f.iterations.to_string(),
            cmp_name,
        ])?;
        report.push_str(&format!(
            "{}: tau_D = {} ps, tau_W = {} ps, converged = {}\n",
            tr.label,
            fmt_f64(s_to_ps(f.tau_d)),
            fmt_f64(s_to_ps(f.tau_w)),
            f.converged
        ));
    }
    fits.finish()?;

    let (with_p, without_p): (Vec<&TemporalTrace>, Vec<&TemporalTrace>) = traces.iter().partition(|t| t.pressure.is_some());
    let owned: Vec<TemporalTrace> = with_p.into_iter().cloned().collect();
    let mut table = Csv::create(out.join("summary.csv"), &["p_mbar", "tau_FW_ps", "tau_W_ps", "tau_D_ps", "label"])?;
    for r in table1_pipeline(&owned)? {
        table.record([
            fmt_f64(r.pressure),
            fmt_f64(s_to_ps(r.tau_fw)),
            fmt_f64(s_to_ps(r.tau_w)),
            fmt_f64(s_to_ps(r.tau_d)),
            r.label,
        ])?;
    }
    for tr in without_p {
        let fw = extract_fwhm(tr)?;
        table.record([
            String::new(),
            fmt_f64(s_to_ps(fw)),
            fmt_f64(s_to_ps(tau_w_from_fwhm(fw)?)),
            fmt_f64(s_to_ps(extract_peak_delay(tr)?)),
            tr.label.clone(),
        ])?;
    }
    table.finish()?;
    Ok(report)
}

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    /// `true` when the value must reach the limit rather than stay below it.
    at_least: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, at_least: false }
    }

    fn above(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, at_least: true }
    }

    fn pass(&self) -> bool {
        if self.at_least {
            self.value >= self.limit
        } else {
            self.value <= self.limit
        }
    }
}

pub fn validate(cfg: &RunConfig, out: &Path) -> Result<String> {
    let mut checks = Vec::new();
    let pulse = cfg.seed_pulse()?;
    let medium = cfg.medium_at(cfg.pressure_mbar)?;
    let gain = medium.with_w0(cfg.w0.abs())?;
    let consts = PhysicalConstants {
        mu0: PhysicalConstants::SI.mu0 * cfg.mu0_scale,
        ..PhysicalConstants::SI
    };

    checks.push(Check::below("constants: |mu0 eps0 c^2 - 1|", consts.maxwell_defect().abs(), 1e-12));
    checks.push(Check::below(
        "tau_W identity: 4hbar/(mu0 c w mu^2 w0 N L) vs 16 pi tau_sp/(3 lambda^2 w0 N L)",
        rel(characteristic_duration_with(&consts, &gain)?, characteristic_duration_from_decay_time(&consts, &gain)?),
        1e-10,
    ));

    // Seed phase at the configured step.
    let t_end = 4.0 * pulse.tau_s;
    let traj = integrate_bloch_rwa(&pulse, &medium, t_end, cfg.dt())?;
    checks.push(Check::below("seed conservation: |v^2 + w^2 - w0^2|", traj.max_norm_drift(medium.w0), 1e-9));
    let mut dev = 0.0f64;
    for s in &traj.samples {
        let th = bloch_angle_with_step(&pulse, &medium, s.t, default_step(&pulse))?;
        let a = state_from_angle(medium.w0, th, s.t);
        dev = dev.max((s.v - a.v).abs()).max((s.w - a.w).abs());
    }
    checks.push(Check::below("seed oracle: RK4 vs closed-form rotation", dev, 1e-8));

    let env = |t: f64| pulse.envelope_at(t);
    let scale = 4.0 * PI / pulse_area(env, t_end, default_step(&pulse));
    let strong = integrate_bloch_with(|t| scale * env(t), 1.0, t_end, cfg.dt())?;
    checks.push(Check::below("strong-drive conservation (4 pi seed, w0 = 1)", strong.max_norm_drift(1.0), 1e-9));

    // Burst.
    let theta_r = bloch_angle_with_step(&pulse, &medium, pulse.tau_r, cfg.dt())?;
    let tau_w = characteristic_duration(&gain)?;
    let mut angles = vec![0.3 * PI, 0.6 * PI];
    if theta_r > 0.0 && theta_r < PI {
        angles.insert(0, theta_r);
    }
    let mut worst = 0.0f64;
    for th in angles {
        let sol = SuperradianceSolution::new(gain, th, cfg.tau_r())?;
        let path = integrate_pendulum(th, cfg.tau_r(), &gain, cfg.tau_r() + 10.0 * tau_w, cfg.pendulum_step_tau_w * tau_w)?;
        for (t, y) in path {
            worst = worst.max((y - sol.bloch_angle(t)).abs());
        }
    }
    checks.push(Check::below("pendulum oracle: |theta_ode - 2 atan(exp((t - tau_D)/tau_W))|", worst, 1e-7));

    let sol = SuperradianceSolution::new(gain, if theta_r > 0.0 && theta_r < PI { theta_r } else { 0.3 * PI }, cfg.tau_r())?;
    let (a, b) = sol.window(cfg.window_tau_w);
    let emitted = simpson(|t| sol.power_density(t), a, b, sol.tau_w / 1000.0);
    checks.push(Check::below(
        "energy bookkeeping: integral of P_s vs drop in E_N",
        rel(emitted, sol.energy_density(a) - sol.energy_density(b)),
        1e-6,
    ));

    let n = 10_001;
    let burst = TemporalTrace::sampled(|t| sol.intensity(t), sol.tau_d - 5.0 * sol.tau_w, sol.tau_d + 5.0 * sol.tau_w, n, None, "model")?;
    checks.push(Check::below(
        "sech^2 FWHM = 2 acosh(sqrt 2) tau_W",
        rel(extract_fwhm(&burst)? / sol.tau_w, sech2_fwhm_factor()),
        1e-4,
    ));

    let anchor = characteristic_duration(&cfg.medium_at(cfg.anchor_p_mbar)?)?;
    checks.push(Check::below(
        "calibration round trip at the anchor pressure",
        rel(anchor, cfg.anchor_tau_w_ps * 1e-12),
        1e-10,
    ));

    check_pressures(cfg, &cfg.pressures)?;
    let rows = pressure_scan(&cfg.calibration()?, &pulse, &cfg.template()?, &cfg.pressures, &cfg.scan_settings()?)?;
    let top = cfg.pressures.iter().copied().fold(f64::MIN, f64::max);
    let mut shape = 0.0f64;
    for r in &rows {
        let x = (r.pressure - cfg.p0_mbar) / (top - cfg.p0_mbar);
        shape = shape.max(rel(r.i_peak_norm, x * x)).max(rel(r.e_total_norm, x));
    }
    checks.push(Check::below("scan shapes: I_norm = x^2, E_norm = x", shape, 1e-12));

    let synth = TemporalTrace::sampled(
        |t| 1.0 / ((t - sol.tau_d) / sol.tau_w).cosh().powi(2),
        sol.tau_d - 12.0 * sol.tau_w,
        sol.tau_d + 12.0 * sol.tau_w,
        4801,
        None,
        "synthetic",
    )?;
    let f = fit_sech2_with(&synth, None, &cfg.fit_options())?;
    let fit_err = if f.converged {
        rel(f.amplitude, 1.0).max(rel(f.tau_d, sol.tau_d)).max(rel(f.tau_w, sol.tau_w))
    } else {
        f64::INFINITY
    };
    checks.push(Check::below("fit recovery on a noiseless sech^2 trace", fit_err, 1e-6));

    let tau2 = dephasing_time(cfg.pressure_mbar, &cfg.dephasing()?)?;
    let margin = superradiance_valid(tau2, sol.tau_w, sol.tau_d).margin;
    checks.push(Check::above("superradiance validity margin tau_2/sqrt(tau_W tau_D)", margin, cfg.validity_threshold));

    let mut report = String::new();
    let mut failed = 0;
    for c in &checks {
        let ok = c.pass();
        failed += usize::from(!ok);
        let op = if c.at_least { ">=" } else { "<=" };
        report.push_str(&format!(
            "{} {}: {} (need {op} {})\n",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            fmt_f64(c.value),
            fmt_f64(c.limit)
        ));
    }
    report.push_str(&format!("{} passed, {failed} failed\n", checks.len() - failed));
    write_text(&out.join("validate_report.txt"), &report)?;
    if failed > 0 {
        print!("{report}");
        return Err(CliError::Validation(failed));
    }
    Ok(report)
}
