//! The table-producing subcommands.

use std::f64::consts::PI;

use kslab::calculus::{mollify, strong_derivative, ws_norm, ws_terms};
use kslab::expr::parse;
use kslab::hk::{hk_integral, ImproperSpec};
use kslab::ks::{ks_report, NormReport};
use kslab::spectral::{bessel_potential, divergence, mean_operator, solve_divergence, ws_bessel_norm, DiscreteMeasure};
use kslab::{BoundKind, CubeFamily, GridBox, GridField, KsConfig};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{num, Artifact, Table};

pub fn run(command: Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let table = match command {
        Command::Norm => norm(cfg)?,
        Command::Cubes => cubes(cfg),
        Command::Weakstrong => weakstrong(cfg)?,
        Command::Mollify => mollify_table(cfg)?,
        Command::Strong => strong(cfg)?,
        Command::Wsnorm => wsnorm(cfg)?,
        Command::Bessel => bessel(cfg)?,
        Command::Divergence => return divergence_artifacts(cfg),
        Command::Meanop => meanop(cfg)?,
        Command::Hk => hk(cfg)?,
        Command::Suite => unreachable!("the suite has its own driver"),
    };
    Ok(vec![Artifact::Table(table)])
}

pub fn ks_config(cfg: &RunConfig) -> KsConfig {
    KsConfig::new(CubeFamily::new(cfg.dim(), cfg.window), cfg.depth)
}

fn bbox(cfg: &RunConfig) -> Result<GridBox> {
    Ok(GridBox::new(cfg.lower.clone(), cfg.upper.clone())?)
}

pub fn sample(cfg: &RunConfig) -> Result<GridField> {
    let expr = parse(&cfg.expr, cfg.dim())?;
    Ok(GridField::sample(&expr, &bbox(cfg)?, &cfg.counts)?.with_periodic(cfg.periodic))
}

fn kind(r: &NormReport) -> &'static str {
    match r.bound_kind {
        BoundKind::Certified => "certified",
        BoundKind::Heuristic => "heuristic",
    }
}

fn norm(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    let ks = ks_config(cfg);
    let r = ks_report(&f, cfg.p, &ks);
    let ws = ws_norm(&f, cfg.k, cfg.p, &ks, cfg.engine.into())?;
    let mut t = Table::new(
        "norm",
        &["p", "ks", "ks_bound", "bound_kind", "lp", "k", "ws", "ws_bound"],
    );
    t.push(vec![
        num(cfg.p),
        num(r.value),
        num(r.bound),
        kind(&r).into(),
        num(f.lp_norm(cfg.p)),
        cfg.k.to_string(),
        num(ws.value),
        num(ws.bound),
    ]);
    Ok(t)
}

fn cubes(cfg: &RunConfig) -> Table {
    let family = CubeFamily::new(cfg.dim(), cfg.window);
    let mut columns = vec!["r".to_string(), "level".into(), "index".into(), "edge".into()];
    columns.extend((1..=cfg.dim()).map(|j| format!("c{j}")));
    let mut t = Table {
        name: "cubes".into(),
        columns,
        rows: Vec::new(),
    };
    for r in 1..=cfg.depth as u64 {
        let (l, i) = kslab::cubes::unpair(r);
        let cube = family.cube(r);
        let mut row = vec![r.to_string(), l.to_string(), i.to_string(), num(cube.edge())];
        row.extend(cube.center().iter().map(|&c| num(c)));
        t.push(row);
    }
    t
}

fn weakstrong(cfg: &RunConfig) -> Result<Table> {
    let ks = ks_config(cfg);
    let bbox = bbox(cfg)?;
    let mut t = Table::new("weakstrong", &["n", "l2", "ks2", "ks2_bound"]);
    for &n in &cfg.ns {
        let f = GridField::from_fn(&bbox, &cfg.counts, |x| (2.0 * PI * n as f64 * x[0]).sin())?;
        let r = ks_report(&f, 2.0, &ks);
        t.push(vec![n.to_string(), num(f.lp_norm(2.0)), num(r.value), num(r.bound)]);
    }
    Ok(t)
}

fn mollify_table(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    let ks = ks_config(cfg);
    let base = ks_report(&f, cfg.p, &ks);
    let mut t = Table::new("mollify", &["eps", "ks_mollified", "ks_field", "ks_distance"]);
    for &eps in &cfg.eps {
        let fe = mollify(&f, eps)?;
        let dist = ks_report(&fe.sub(&f)?, cfg.p, &ks);
        t.push(vec![
            num(eps),
            num(ks_report(&fe, cfg.p, &ks).value),
            num(base.value),
            num(dist.value),
        ]);
    }
    Ok(t)
}

fn strong(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    let sd = strong_derivative(&f, &cfg.direction, cfg.p, &cfg.h, &ks_config(cfg))?;
    let mut t = Table::new("strong", &["h_coarse", "h_fine", "ks_distance", "bound"]);
    for row in &sd.rows {
        t.push(vec![
            num(row.h_coarse),
            num(row.h_fine),
            num(row.report.value),
            num(row.report.bound),
        ]);
    }
    Ok(t)
}

fn wsnorm(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    let ks = ks_config(cfg);
    let engine = cfg.engine.into();
    let mut t = Table::new("wsnorm", &["alpha", "order", "ks", "ks_bound"]);
    for (alpha, r) in ws_terms(&f, cfg.k, cfg.p, &ks, engine)? {
        t.push(vec![alpha.to_string(), alpha.order().to_string(), num(r.value), num(r.bound)]);
    }
    let total = ws_norm(&f, cfg.k, cfg.p, &ks, engine)?;
    t.push(vec!["total".into(), cfg.k.to_string(), num(total.value), num(total.bound)]);
    Ok(t)
}

fn max_gap(a: &GridField, b: &GridField) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn bessel(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    if !f.is_periodic() {
        return Err(CliError::Config("bessel needs --periodic true".into()));
    }
    let ks = ks_config(cfg);
    let mut t = Table::new("bessel", &["s", "ws_bessel", "inverse_error", "semigroup_error"]);
    for &s in &cfg.s {
        let ps = bessel_potential(&f, s)?;
        let inverse = max_gap(&bessel_potential(&ps, -s)?, &f)?;
        let mut semigroup = 0.0f64;
        for &u in &cfg.s {
            let composed = bessel_potential(&ps, u)?;
            semigroup = semigroup.max(max_gap(&composed, &bessel_potential(&f, s + u)?)?);
        }
        t.push(vec![
            num(s),
            num(ws_bessel_norm(&f, s, &ks)?.value),
            num(inverse),
            num(semigroup),
        ]);
    }
    Ok(t)
}

fn divergence_artifacts(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let f = sample(cfg)?;
    if !f.is_periodic() {
        return Err(CliError::Config("divergence needs --periodic true".into()));
    }
    let parts = solve_divergence(&f)?;
    let residual = divergence(&parts)?.sub(&f)?.lp_norm(2.0);
    let scale = f.lp_norm(2.0);
    let mut t = Table::new("divergence", &["l2_field", "l2_residual", "relative_residual"]);
    let relative = if scale > 0.0 { residual / scale } else { 0.0 };
    t.push(vec![num(scale), num(residual), num(relative)]);
    let mut out = vec![Artifact::Table(t)];
    for (j, field) in parts.into_iter().enumerate() {
        out.push(Artifact::Field {
            name: format!("divergence_F{}", j + 1),
            field,
        });
    }
    Ok(out)
}

fn meanop(cfg: &RunConfig) -> Result<Table> {
    let f = sample(cfg)?;
    let ks = ks_config(cfg);
    let atoms = cfg
        .atoms
        .iter()
        .map(|a| cfg.direction.iter().map(|v| a * v).collect())
        .collect();
    let mu = DiscreteMeasure::new(atoms, cfg.weights.clone())?;
    let mut t = Table::new("meanop", &["t", "ks2_deviation", "l2_deviation"]);
    for &s in &cfg.t {
        let gap = f.sub(&mean_operator(&f, &mu, s)?)?;
        t.push(vec![num(s), num(ks_report(&gap, 2.0, &ks).value), num(gap.lp_norm(2.0))]);
    }
    Ok(t)
}

fn hk(cfg: &RunConfig) -> Result<Table> {
    if cfg.dim() != 1 {
        return Err(CliError::Config("hk integrates in one dimension".into()));
    }
    let expr = parse(&cfg.expr, 1)?;
    let mut spec = ImproperSpec::new(expr, cfg.from, cfg.to, cfg.tol);
    spec.singular = cfg.singular.into();
    let r = hk_integral(&spec)?;
    let mut t = Table::new("hk", &["value", "levels", "converged", "last_1", "last_2"]);
    t.push(vec![
        num(r.value),
        r.levels.to_string(),
        r.converged.to_string(),
        num(r.last[0]),
        num(r.last[1]),
    ]);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Params;

    fn resolve(command: Command, params: Params) -> RunConfig {
        RunConfig::resolve(command, params).unwrap()
    }

    fn table(command: Command, params: Params) -> Table {
        match run(command, &resolve(command, params)).unwrap().remove(0) {
            Artifact::Table(t) => t,
            Artifact::Field { .. } => panic!("expected a table"),
        }
    }

    fn value(t: &Table, row: usize, column: &str) -> f64 {
        t.get(row, column).unwrap().parse().unwrap()
    }

    #[test]
    fn norm_of_zero_is_zero() {
        let t = table(
            Command::Norm,
            Params {
                expr: Some("0".into()),
                p: Some(2.0),
                ..Params::default()
            },
        );
        assert_eq!(value(&t, 0, "ks"), 0.0);
        assert_eq!(value(&t, 0, "lp"), 0.0);
    }

    #[test]
    fn weakstrong_table() {
        let t = table(Command::Weakstrong, Params::default());
        let l2: Vec<f64> = (0..5).map(|r| value(&t, r, "l2")).collect();
        let ks: Vec<f64> = (0..5).map(|r| value(&t, r, "ks2")).collect();
        assert!(l2.iter().all(|v| (v - 0.5f64.sqrt()).abs() < 1e-3));
        assert!(ks.windows(2).all(|w| w[1] < w[0]), "{ks:?}");
    }

    #[test]
    fn cubes_dump() {
        let t = table(
            Command::Cubes,
            Params {
                depth: Some(3),
                window: Some(1),
                ..Params::default()
            },
        );
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1], vec!["2", "2", "1", "0.5", "-1"]);
    }

    #[test]
    fn hk_reports_convergence() {
        let t = table(
            Command::Hk,
            Params {
                expr: Some("1/sqrt(x1)".into()),
                tol: Some(1e-9),
                ..Params::default()
            },
        );
        assert_eq!(t.get(0, "converged"), Some("true"));
        assert!((value(&t, 0, "value") - 2.0).abs() < 1e-8);
    }

    #[test]
    fn divergence_writes_components() {
        let cfg = resolve(Command::Divergence, Params::default());
        let artifacts = run(Command::Divergence, &cfg).unwrap();
        let names: Vec<&str> = artifacts.iter().map(|a| a.name()).collect();
        assert_eq!(names, vec!["divergence", "divergence_F1", "divergence_F2"]);
        let Artifact::Table(t) = &artifacts[0] else { panic!() };
        assert!(value(t, 0, "relative_residual") < 1e-12);
    }

    #[test]
    fn nonzero_mean_divergence_is_a_numerical_error() {
        let cfg = resolve(
            Command::Divergence,
            Params {
                expr: Some("1 + x1 * 0".into()),
                ..Params::default()
            },
        );
        assert_eq!(run(Command::Divergence, &cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn remaining_tables_have_one_row_per_schedule_entry() {
        assert_eq!(table(Command::Mollify, Params::default()).rows.len(), 4);
        assert_eq!(table(Command::Strong, Params::default()).rows.len(), 3);
        assert_eq!(table(Command::Bessel, Params::default()).rows.len(), 5);
        assert_eq!(table(Command::Meanop, Params::default()).rows.len(), 3);
        // (0), (1), total.
        assert_eq!(table(Command::Wsnorm, Params::default()).rows.len(), 3);
    }
}
