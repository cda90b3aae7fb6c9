//! JSON run configuration. Interval endpoints may be `null`, read as -inf on
//! the left and +inf on the right.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use valdist::herglotz::{BoundaryM, IntervalUnion, RationalHerglotz};
use valdist::value_distribution::{BandSpec, LambdaFn, Target};
use valdist::{IntegratorConfig, Interpolation, Method, Potential, PotentialTable};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<valdist::Error> for ConfigError {
    fn from(e: valdist::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub lambda: Option<[f64; 2]>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub x_list: Vec<f64>,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub n_list: Vec<f64>,
    #[serde(default)]
    pub nu_list: Vec<f64>,
    /// The target set S as a list of [lo, hi] pairs.
    #[serde(default)]
    pub target: Option<Vec<[Option<f64>; 2]>>,
    #[serde(default)]
    pub band: Option<BandConfig>,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub herglotz: Option<HerglotzSpec>,
    /// Fixed M = [Re, Im] for the Condition A ratio; defaults to the boundary model.
    #[serde(default)]
    pub m: Option<[f64; 2]>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKindSpec {
    Zero,
    InverseSquare,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationSpec {
    Linear,
    #[default]
    MonotoneCubic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKindSpec,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    /// CSV file with header `x,q`; relative paths resolve against the config file.
    #[serde(default)]
    pub table: Option<PathBuf>,
    #[serde(default)]
    pub interpolation: InterpolationSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LambdaFnSpec {
    Constant(f64),
    Step { breaks: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub c: LambdaFnSpec,
    pub d: LambdaFnSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    Free,
    Constant { re: f64, im: f64 },
    Bessel { nu: f64, a: f64 },
    Appell,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HerglotzSpec {
    Rational {
        #[serde(default)]
        poles: Vec<[f64; 2]>,
        #[serde(default)]
        slope: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        imag_offset: f64,
    },
    FreeWeyl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    #[default]
    Dop853,
    Dopri5,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default)]
    pub method: MethodSpec,
}

#[derive(Debug, Deserialize)]
struct TableRecord {
    x: f64,
    q: f64,
}

/// Reads and parses a configuration file.
pub fn load(path: &Path) -> Result<(RunConfig, PathBuf), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let cfg = parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
}

fn check_schedule(name: &str, xs: &[f64]) -> Result<(), ConfigError> {
    if xs.is_empty() {
        return bad(format!("{name} must not be empty"));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return bad(format!("{name} entries must be positive and finite"));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return bad(format!("{name} must be strictly increasing"));
    }
    Ok(())
}

impl RunConfig {
    pub fn lambda(&self) -> Result<(f64, f64), ConfigError> {
        match self.lambda {
            Some([lo, hi]) if lo.is_finite() && hi.is_finite() && lo < hi => Ok((lo, hi)),
            Some([lo, hi]) => bad(format!("lambda needs lo < hi, got [{lo}, {hi}]")),
            None => bad("lambda is required"),
        }
    }

    pub fn grid_n(&self) -> Result<usize, ConfigError> {
        match self.grid_n {
            Some(n) if n >= 2 => Ok(n),
            Some(n) => bad(format!("grid_n must be >= 2, got {n}")),
            None => bad("grid_n is required"),
        }
    }

    pub fn x_list(&self) -> Result<&[f64], ConfigError> {
        check_schedule("x_list", &self.x_list)?;
        Ok(&self.x_list)
    }

    pub fn eps_list(&self) -> Result<&[f64], ConfigError> {
        check_schedule("eps_list", &self.eps_list)?;
        Ok(&self.eps_list)
    }

    pub fn n_list(&self) -> Result<&[f64], ConfigError> {
        check_schedule("n_list", &self.n_list)?;
        Ok(&self.n_list)
    }

    pub fn nu_list(&self) -> Result<&[f64], ConfigError> {
        if self.nu_list.is_empty() {
            return bad("nu_list must not be empty");
        }
        if self.nu_list.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
            return bad("nu_list entries must be finite and >= 0");
        }
        Ok(&self.nu_list)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, ConfigError> {
        let mut cfg = IntegratorConfig::default();
        if let Some(t) = &self.tolerances {
            cfg.rel_tol = t.rel_tol.unwrap_or(cfg.rel_tol);
            cfg.abs_tol = t.abs_tol.unwrap_or(cfg.abs_tol);
            cfg.max_step = t.max_step.unwrap_or(cfg.max_step);
            cfg.method = match t.method {
                MethodSpec::Dop853 => Method::Dop853,
                MethodSpec::Dopri5 => Method::Dopri5,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn potential(&self, base: &Path) -> Result<Potential, ConfigError> {
        let Some(spec) = &self.potential else {
            return bad("potential is required");
        };
        let a = spec.a.unwrap_or(match spec.kind {
            PotentialKindSpec::InverseSquare => 1.0,
            _ => 0.0,
        });
        let p = match spec.kind {
            PotentialKindSpec::Zero => Potential::zero(a),
            PotentialKindSpec::InverseSquare => {
                let Some(nu) = spec.nu else {
                    return bad("inverse_square potential needs nu");
                };
                Potential::inverse_square(nu, a)?
            }
            PotentialKindSpec::Tabulated => {
                let Some(rel) = &spec.table else {
                    return bad("tabulated potential needs a table path");
                };
                let path = base.join(rel);
                let mut reader = csv::ReaderBuilder::new()
                    .trim(csv::Trim::All)
                    .comment(Some(b'#'))
                    .from_path(&path)
                    .map_err(|e| {
                        ConfigError(format!("cannot read table {}: {e}", path.display()))
                    })?;
                let mut xs = Vec::new();
                let mut qs = Vec::new();
                for rec in reader.deserialize::<TableRecord>() {
                    let rec = rec.map_err(|e| {
                        ConfigError(format!("bad table row in {}: {e}", path.display()))
                    })?;
                    xs.push(rec.x);
                    qs.push(rec.q);
                }
                let interp = match spec.interpolation {
                    InterpolationSpec::Linear => Interpolation::Linear,
                    InterpolationSpec::MonotoneCubic => Interpolation::MonotoneCubic,
                };
                Potential::tabulated(PotentialTable::new(xs, qs, interp)?, a)?
            }
        };
        if spec.kind != PotentialKindSpec::InverseSquare && spec.nu.is_some() {
            return bad("nu only applies to the inverse_square potential");
        }
        Ok(p)
    }

    /// The boundary model m⁺(λ); when absent it follows the potential.
    pub fn boundary(&self, p: &Potential, cfg: IntegratorConfig) -> Result<BoundaryM, ConfigError> {
        use valdist::PotentialKind;
        Ok(match &self.boundary {
            Some(BoundarySpec::Free) => BoundaryM::free(),
            Some(BoundarySpec::Constant { re, im }) => BoundaryM::constant(*re, *im)?,
            Some(BoundarySpec::Bessel { nu, a }) => BoundaryM::bessel(*nu, *a)?,
            Some(BoundarySpec::Appell) => BoundaryM::appell(p.clone(), cfg),
            None => match p.kind() {
                PotentialKind::Zero => BoundaryM::free(),
                PotentialKind::InverseSquare { nu } => BoundaryM::bessel(*nu, p.a())?,
                PotentialKind::Tabulated(_) => BoundaryM::appell(p.clone(), cfg),
            },
        })
    }

    pub fn target_set(&self) -> Result<IntervalUnion, ConfigError> {
        let Some(pairs) = &self.target else {
            return bad("target is required");
        };
        let ivs = pairs
            .iter()
            .map(|[lo, hi]| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)));
        Ok(IntervalUnion::new(ivs)?)
    }

    pub fn target(&self) -> Result<Target, ConfigError> {
        Ok(Target::Fixed(self.target_set()?))
    }

    pub fn band(&self) -> Result<BandSpec, ConfigError> {
        let Some(band) = &self.band else {
            return bad("band is required");
        };
        let conv = |s: &LambdaFnSpec| -> Result<LambdaFn, ConfigError> {
            Ok(match s {
                LambdaFnSpec::Constant(v) => LambdaFn::Constant(*v),
                LambdaFnSpec::Step { breaks, values } => {
                    LambdaFn::step(breaks.clone(), values.clone())?
                }
            })
        };
        Ok(BandSpec {
            c: conv(&band.c)?,
            d: conv(&band.d)?,
        })
    }

    pub fn herglotz(&self) -> Result<HerglotzChoice, ConfigError> {
        match &self.herglotz {
            Some(HerglotzSpec::Rational {
                poles,
                slope,
                offset,
                imag_offset,
            }) => {
                let poles = poles.iter().map(|[l, w]| (*l, *w)).collect();
                Ok(HerglotzChoice::Rational(RationalHerglotz::new(
                    poles,
                    *slope,
                    *offset,
                    *imag_offset,
                )?))
            }
            Some(HerglotzSpec::FreeWeyl) => Ok(HerglotzChoice::FreeWeyl),
            None => bad("herglotz is required"),
        }
    }
}

pub enum HerglotzChoice {
    Rational(RationalHerglotz),
    FreeWeyl,
}
