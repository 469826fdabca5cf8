use std::fs;
use std::path::Path;

use nccs::beamsplitter::{entropy_scan, flag, EntropyScan};
use nccs::fock_io::{write_csv, write_state_json, write_svg_lineplot, PlotStyle, ScanTable};
use nccs::measure::{calibrate, moment_check};
use nccs::metrics::{
    find_local_maxima, gk_autocorrelation, gk_uncertainty_product, nonclassicality_report, revival_times,
    Frame, LadderAction, NbarRule,
};
use nccs::states::{
    cat_q, gk_coherent, glauber, ho_squeezed, nc_squeezed, nlcs, pacs_q, q_coherent, GkBasis, DEFAULT_N_MAX,
};
use nccs::{Deformation, FockState};

use crate::config::{parse_grid, FamilyKind, Format, RunConfig};
use crate::CliError;

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
}

fn q_of(d: &Deformation) -> f64 {
    match *d {
        Deformation::QDeformed { q } => q,
        _ => 1.0,
    }
}

fn build_state(cfg: &RunConfig) -> Result<(FockState, Deformation), CliError> {
    let family = cfg
        .family
        .ok_or_else(|| CliError::validation("--family is required"))?;
    let d = cfg.deformation()?;
    let trunc = cfg.truncation()?;
    let a = cfg.alpha();
    let s = match family {
        FamilyKind::Vacuum => FockState::vacuum(cfg.nmax.unwrap_or(DEFAULT_N_MAX)),
        FamilyKind::Fock => {
            let n = cfg
                .n
                .ok_or_else(|| CliError::validation("--n is required for fock"))?;
            FockState::fock(n, cfg.nmax.unwrap_or(DEFAULT_N_MAX.max(n + 8)))?
        }
        FamilyKind::Glauber => glauber(a, &trunc)?,
        FamilyKind::Nlcs => nlcs(a, d.tau(), &trunc)?,
        FamilyKind::QCoherent => q_coherent(a, q_of(&d), &trunc)?,
        FamilyKind::Cat => cat_q(a, q_of(&d), cfg.parity(), &trunc)?,
        FamilyKind::Pacs => pacs_q(a, q_of(&d), cfg.m.unwrap_or(1), &trunc)?,
        FamilyKind::NcSqueezed => nc_squeezed(a, cfg.zeta(), d.tau(), &trunc)?,
        FamilyKind::HoSqueezed => ho_squeezed(a, cfg.zeta(), &trunc)?,
        FamilyKind::Gk => {
            let j = cfg
                .j
                .ok_or_else(|| CliError::validation("--J is required for gk"))?;
            gk_coherent(j, cfg.gamma.unwrap_or(0.0), d.tau(), GkBasis::Perturbed, &trunc)?
        }
    };
    Ok((s, d))
}

fn distribution_table(s: &FockState) -> Result<ScanTable, CliError> {
    let mut t = ScanTable::new(["n", "P"]).with_provenance("state", &s.label);
    for (n, p) in s.probabilities().iter().enumerate() {
        t.push_row(vec![n as f64, *p])?;
    }
    Ok(t)
}

pub fn cmd_state(cfg: &RunConfig) -> Result<(), CliError> {
    let (s, _) = build_state(cfg)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    if cfg.wants(Format::Json) {
        write_state_json(&s, &dir.join("state.json"))?;
    }
    let dist = distribution_table(&s)?;
    if cfg.wants(Format::Csv) {
        write_csv(&dist, &dir.join("photon_distribution.csv"))?;
    }
    if cfg.wants(Format::Svg) {
        let style = PlotStyle {
            title: s.label.clone(),
            x_label: "n".into(),
            y_label: "P_n".into(),
            ..PlotStyle::default()
        };
        write_svg_lineplot(&dist, "n", &["P"], &dir.join("photon_distribution.svg"), &style)?;
    }
    println!("state      {}", s.label);
    println!("n_max      {}", s.n_max());
    println!("ln N       {:.12e}", s.ln_norm);
    println!("N          {:.12e}", s.ln_norm.exp());
    println!("tail_mass  {:.6e}", s.tail_mass);
    println!("<n>        {:.12e}", s.mean_n());
    Ok(())
}

/// Photon counting conventions: bare n̂ for the harmonic and NC families (the
/// latter read in the first-order energy basis), A†A for q-deformed states.
fn ladder_for(d: &Deformation) -> LadderAction {
    match d {
        Deformation::Harmonic => LadderAction::bare(*d),
        Deformation::PerturbativeNc { .. } => LadderAction::bare(*d).in_frame(Frame::Energy),
        Deformation::QDeformed { .. } => LadderAction::deformed(*d),
    }
}

pub fn cmd_metrics(cfg: &RunConfig) -> Result<(), CliError> {
    // quadratures need the edge amplitudes below 1e-12, not just a light tail
    let mut cfg = cfg.clone();
    cfg.threshold = cfg.threshold.or(Some(1e-26));
    let cfg = &cfg;
    let (s, d) = build_state(cfg)?;
    let l = ladder_for(&d);
    let r = nonclassicality_report(&s, &l)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    if cfg.wants(Format::Json) {
        let path = dir.join("report.json");
        let text = serde_json::to_string_pretty(&r).map_err(|e| CliError::validation(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    if cfg.wants(Format::Csv) {
        let t = ScanTable {
            rows: r
                .photon_dist
                .iter()
                .enumerate()
                .map(|(n, p)| vec![n as f64, *p])
                .collect(),
            ..ScanTable::new(["n", "P"])
        };
        write_csv(&t, &dir.join("photon_distribution.csv"))?;
    }
    println!("state      {}", s.label);
    println!("convention {:?} / {:?}", l.number_convention, l.frame);
    println!("var_y      {:.12e}", r.var_y);
    println!("var_z      {:.12e}", r.var_z);
    println!("gur_rhs    {:.12e}", r.gur_rhs);
    println!("mandel_q   {:.12e}", r.mandel_q);
    println!("g2_zero    {:.12e}", r.g2_zero);
    println!("mean_n     {:.12e}", r.mean_n);
    Ok(())
}

fn fmt_time(t: f64) -> String {
    if t.is_finite() {
        format!("{t:.2}")
    } else {
        "inf".into()
    }
}

pub fn cmd_autocorr(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg
        .deformation
        .is_some_and(|k| k != crate::config::DeformationKind::Nc)
    {
        return Err(CliError::validation("autocorr uses the NC spectrum"));
    }
    let tau = cfg.require_tau()?;
    let j = cfg.j.ok_or_else(|| CliError::validation("--J is required"))?;
    let trunc = cfg.truncation()?;
    let (omega, hbar) = (cfg.omega(), cfg.hbar());
    let rule = cfg.nbar.map_or(NbarRule::Mean, NbarRule::Explicit);
    let rt = revival_times(j, tau, omega, hbar, rule, &trunc)?;
    let t0 = cfg.t_start.unwrap_or(0.0);
    let t1 = cfg
        .t_end
        .unwrap_or(if rt.revives { rt.t_rev } else { t0 + 20.0 * rt.t_cl });
    let steps = cfg.t_steps.unwrap_or(10_001);
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(CliError::validation(format!("empty time range [{t0}, {t1}]")));
    }
    if steps < 2 {
        return Err(CliError::validation("--t-steps must be at least 2"));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| t0 + (t1 - t0) * k as f64 / (steps - 1) as f64)
        .collect();
    let a = gk_autocorrelation(j, cfg.gamma.unwrap_or(0.0), tau, omega, &grid, &trunc)?;

    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    let mut table = ScanTable::new(["t", "A"])
        .with_provenance("J", j)
        .with_provenance("tau", tau)
        .with_provenance("omega", omega)
        .with_provenance("version", env!("CARGO_PKG_VERSION"));
    for (t, v) in grid.iter().zip(&a) {
        table.push_row(vec![*t, *v])?;
    }
    if cfg.wants(Format::Csv) {
        write_csv(&table, &dir.join("autocorrelation.csv"))?;
    }
    if cfg.wants(Format::Svg) {
        let style = PlotStyle {
            title: format!("J = {j}, tau = {tau}"),
            x_label: "t".into(),
            y_label: "A(t)".into(),
            ..PlotStyle::default()
        };
        write_svg_lineplot(&table, "t", &["A"], &dir.join("autocorrelation.svg"), &style)?;
    }
    println!("nbar       {:.6}", rt.nbar);
    println!("t_cl       {}", fmt_time(rt.t_cl));
    println!("t_rev      {}", fmt_time(rt.t_rev));
    let gamma = cfg.gamma.unwrap_or(0.0);
    let u = gk_uncertainty_product(j, gamma, tau, cfg.mass(), omega, hbar, &trunc)?;
    println!(
        "dX dP      {:.10}  (closed form {:.10})",
        u.numeric, u.closed_form
    );
    let peaks: Vec<_> = find_local_maxima(&grid, &a)
        .into_iter()
        .filter(|p| p.1 > 0.5)
        .take(20)
        .collect();
    println!("peaks (A > 0.5):");
    for (t, v) in peaks {
        println!("  t = {t:.4}  A = {v:.6}");
    }
    Ok(())
}

pub fn cmd_entropy_scan(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.q.is_some() {
        return Err(CliError::validation("--q does not apply to entropy scans"));
    }
    let fk = cfg.family.unwrap_or(FamilyKind::Nlcs);
    let family = fk
        .scan_family()
        .ok_or_else(|| CliError::validation(format!("family {fk:?} cannot be scanned")))?;
    let alphas = parse_grid(cfg.alpha_grid.as_deref().unwrap_or("0:2.5:25"))?;
    let taus = match (&cfg.tau_grid, cfg.tau) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(t)) => vec![t],
        (None, None) => vec![0.0],
    };
    let spec = EntropyScan {
        family,
        alphas,
        taus: taus.clone(),
        zeta: cfg.zeta.unwrap_or(0.0),
        bs: cfg.beam_splitter()?,
        n_max: cfg.nmax.unwrap_or(40),
        threshold: cfg.threshold.unwrap_or(1e-10),
    };
    let table = entropy_scan(&spec)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    if cfg.wants(Format::Csv) {
        write_csv(&table, &dir.join("entropy_scan.csv"))?;
    }
    if cfg.wants(Format::Svg) {
        // one series per tau
        let names: Vec<String> = taus.iter().map(|t| format!("S tau={t}")).collect();
        let mut wide = ScanTable::new(std::iter::once("alpha".to_string()).chain(names.clone()));
        for (i, a) in spec.alphas.iter().enumerate() {
            let mut row = vec![*a];
            row.extend((0..taus.len()).map(|k| table.rows[i * taus.len() + k][3]));
            wide.push_row(row)?;
        }
        let style = PlotStyle {
            title: format!("{:?}, zeta = {}", spec.family, spec.zeta),
            x_label: "alpha".into(),
            y_label: "linear entropy".into(),
            ..PlotStyle::default()
        };
        let cols: Vec<&str> = names.iter().map(String::as_str).collect();
        write_svg_lineplot(&wide, "alpha", &cols, &dir.join("entropy_scan.svg"), &style)?;
    }
    let flagged = table.rows.iter().filter(|r| r[5] != flag::OK).count();
    println!("points     {}", table.rows.len());
    println!("flagged    {flagged}");
    Ok(())
}

pub fn cmd_measure_check(cfg: &RunConfig) -> Result<(), CliError> {
    let tau = cfg.require_tau()?;
    let top = cfg.moments.unwrap_or(10);
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let p = calibrate(tau)?;
    let mut table = ScanTable::new(["n", "computed", "target", "rel_err"])
        .with_provenance("tau", tau)
        .with_provenance("mu", p.mu)
        .with_provenance("beta", p.beta)
        .with_provenance("ln_norm", p.ln_norm)
        .with_provenance("version", env!("CARGO_PKG_VERSION"));
    println!(
        "tau {tau}  mu {}  beta {}  ln norm {:.12e}",
        p.mu, p.beta, p.ln_norm
    );
    let mut worst: f64 = 0.0;
    for n in 0..=top {
        let m = moment_check(n, &p)?;
        println!(
            "n = {n:3}  computed {:.12e}  target {:.12e}  rel_err {:.3e}",
            m.computed, m.target, m.rel_err
        );
        worst = worst.max(m.rel_err);
        table.push_row(vec![n as f64, m.computed, m.target, m.rel_err])?;
    }
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    if cfg.wants(Format::Csv) {
        write_csv(&table, &dir.join("moments.csv"))?;
    }
    if worst > tol {
        return Err(CliError::tolerance(format!(
            "largest relative error {worst:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(())
}
