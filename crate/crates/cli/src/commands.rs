use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use valdist::appell::spectral_density;
use valdist::bessel::{bessel_density, bessel_eval};
use valdist::herglotz::{theorem1_gap, FreeWeylM, HerglotzFunction};
use valdist::value_distribution::{condition_a_ratios, theorem2_table, uad_check, TableRow};
use valdist::{Potential, PotentialKind};

use crate::config::{ConfigError, HerglotzChoice, RunConfig};
use crate::table::{Cell, Table};

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical {
        message: String,
        lambda: Option<f64>,
    },
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<valdist::Error> for RunError {
    fn from(e: valdist::Error) -> Self {
        if e.is_numerical() {
            RunError::Numerical {
                lambda: e.lambda(),
                message: e.to_string(),
            }
        } else {
            RunError::Config(e.to_string())
        }
    }
}

type Run = Result<Table, RunError>;

/// `n` equally spaced points from lo to hi inclusive.
fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * h })
        .collect()
}

/// Runs `f` over the λ-grid in parallel; output order and the reported
/// failure are both fixed by grid order.
fn per_lambda<T: Send>(
    grid: &[f64],
    f: impl Fn(f64) -> valdist::Result<T> + Sync,
) -> Result<Vec<T>, RunError> {
    let results: Vec<_> = grid.par_iter().map(|&l| (l, f(l))).collect();
    results
        .into_iter()
        .map(|(l, r)| {
            r.map_err(|e| match RunError::from(e) {
                RunError::Numerical { message, lambda } => RunError::Numerical {
                    message,
                    lambda: lambda.or(Some(l)),
                },
                other => other,
            })
        })
        .collect()
}

fn closed_form_density(p: &Potential, lambda: f64) -> valdist::Result<Option<f64>> {
    Ok(match p.kind() {
        PotentialKind::Zero => Some(lambda.sqrt() / PI),
        PotentialKind::InverseSquare { nu } => Some(bessel_density(*nu, p.a(), lambda)?),
        PotentialKind::Tabulated(_) => None,
    })
}

pub fn density(cfg: &RunConfig, base: &Path) -> Run {
    let p = cfg.potential(base)?;
    let grid = linspace(cfg.lambda()?, cfg.grid_n()?);
    let icfg = cfg.integrator()?;
    let rows = per_lambda(&grid, |l| {
        let d = spectral_density(&p, l, &icfg)?;
        Ok((d, closed_form_density(&p, l)?))
    })?;
    let mut t = Table::new(vec![
        "lambda",
        "a_tilde",
        "b_tilde",
        "c_tilde",
        "f_numeric",
        "f_closed_form",
        "rel_error",
    ]);
    for (d, exact) in rows {
        let (cf, rel) = match exact {
            Some(e) => (Cell::Num(e), Cell::Num((d.f - e).abs() / e)),
            None => (Cell::Empty, Cell::Empty),
        };
        t.push(vec![
            Cell::Num(d.lambda),
            Cell::Num(d.a_tilde),
            Cell::Num(d.b_tilde),
            Cell::Num(d.c_tilde),
            Cell::Num(d.f),
            cf,
            rel,
        ]);
    }
    Ok(t)
}

fn table_rows(rows: Vec<TableRow>) -> Table {
    let mut t = Table::new(vec!["x", "empirical", "limit", "abs_error"]);
    for r in rows {
        t.push(vec![
            Cell::Num(r.x),
            Cell::Num(r.empirical),
            Cell::Num(r.limit),
            Cell::Num(r.error),
        ]);
    }
    t
}

pub fn distcheck(cfg: &RunConfig, base: &Path) -> Run {
    let p = cfg.potential(base)?;
    let icfg = cfg.integrator()?;
    let model = cfg.boundary(&p, icfg)?;
    let rows = uad_check(
        &p,
        &model,
        cfg.lambda()?,
        &cfg.band()?,
        cfg.x_list()?,
        cfg.grid_n()?,
        &icfg,
    )?;
    Ok(table_rows(rows))
}

pub fn theorem2(cfg: &RunConfig, base: &Path) -> Run {
    let p = cfg.potential(base)?;
    let icfg = cfg.integrator()?;
    let model = cfg.boundary(&p, icfg)?;
    let rows = theorem2_table(
        &p,
        &model,
        &cfg.target()?,
        cfg.lambda()?,
        cfg.x_list()?,
        cfg.grid_n()?,
        &icfg,
    )?;
    Ok(table_rows(rows))
}

pub fn herglotz(cfg: &RunConfig) -> Run {
    let choice = cfg.herglotz()?;
    let f: &dyn HerglotzFunction = match &choice {
        HerglotzChoice::Rational(r) => r,
        HerglotzChoice::FreeWeyl => &FreeWeylM,
    };
    let s = cfg.target_set()?;
    let (lambda, n) = (cfg.lambda()?, cfg.grid_n()?);
    let mut t = Table::new(vec!["eps", "lhs", "rhs", "lhs_le_rhs"]);
    for &eps in cfg.eps_list()? {
        let g = theorem1_gap(f, &s, lambda, eps, n)?;
        t.push(vec![
            Cell::Num(g.eps),
            Cell::Num(g.lhs),
            Cell::Num(g.rhs),
            Cell::Flag(g.holds(0.0)),
        ]);
    }
    Ok(t)
}

pub fn condition_a(cfg: &RunConfig, base: &Path) -> Run {
    let p = cfg.potential(base)?;
    let icfg = cfg.integrator()?;
    let grid = linspace(cfg.lambda()?, cfg.grid_n()?);
    let ns = cfg.n_list()?;
    let fixed = cfg.m.map(|[re, im]| Complex64::new(re, im));
    let model = match fixed {
        Some(_) => None,
        None => Some(cfg.boundary(&p, icfg)?),
    };
    let rows = per_lambda(&grid, |l| {
        let m = match (&fixed, &model) {
            (Some(m), _) => *m,
            (None, Some(model)) => {
                let (a, b) = model.eval(l)?;
                Complex64::new(a, b)
            }
            (None, None) => unreachable!(),
        };
        condition_a_ratios(&p, l, m, ns, &icfg)
    })?;
    let mut t = Table::new(vec!["lambda", "n", "ratio_re", "ratio_im", "ratio_abs"]);
    for (&l, ratios) in grid.iter().zip(rows) {
        for (&n, r) in ns.iter().zip(ratios) {
            t.push(vec![
                Cell::Num(l),
                Cell::Num(n),
                Cell::Num(r.re),
                Cell::Num(r.im),
                Cell::Num(r.norm()),
            ]);
        }
    }
    Ok(t)
}

pub fn bessel(cfg: &RunConfig) -> Run {
    let xs = cfg.x_list()?;
    let mut t = Table::new(vec![
        "nu",
        "x",
        "j",
        "y",
        "jprime",
        "yprime",
        "wronskian_rel_error",
    ]);
    for &nu in cfg.nu_list()? {
        for &x in xs {
            let b = bessel_eval(nu, x)?;
            t.push(vec![
                Cell::Num(nu),
                Cell::Num(x),
                Cell::Num(b.j),
                Cell::Num(b.y),
                Cell::Num(b.jprime),
                Cell::Num(b.yprime),
                Cell::Num(b.wronskian_error()),
            ]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let g = linspace((1.0, 9.0), 9);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[3], 4.0);
        assert_eq!(g[8], 9.0);
    }
}
