//! Point evaluation of the kernels and Gegenbauer polynomials.

use hspot::special::{gegenbauer_derivative, gegenbauer_eval, gegenbauer_max, GegenbauerParam};
use hspot::{plane_kernels as pk, space_kernels as sk, Complex64};

use crate::scenario::parse_list;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Plane,
    PlaneMod,
    Space,
    SpaceMod,
    GreenPlane,
    GreenSpace,
}

impl KernelFamily {
    pub const NAMES: [&'static str; 6] = ["plane", "plane-mod", "space", "space-mod", "green-plane", "green-space"];

    pub fn from_name(s: &str) -> CliResult<Self> {
        Ok(match s {
            "plane" => Self::Plane,
            "plane-mod" => Self::PlaneMod,
            "space" => Self::Space,
            "space-mod" => Self::SpaceMod,
            "green-plane" => Self::GreenPlane,
            "green-space" => Self::GreenSpace,
            _ => return Err(CliError::usage(format!("unknown kernel family '{s}'; expected one of {}", Self::NAMES.join(", ")))),
        })
    }
}

/// Coordinates of the evaluation, as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct KernelArgs {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub z: Option<String>,
    pub t: Option<f64>,
    pub zeta: Option<String>,
    pub x: Option<String>,
    pub yp: Option<String>,
    pub y: Option<String>,
}

fn coords(flag: &str, v: Option<&String>, len: Option<usize>) -> CliResult<Vec<f64>> {
    let v = v.ok_or_else(|| CliError::usage(format!("missing --{flag}")))?;
    let c = parse_list(flag, v)?;
    if let Some(len) = len {
        if c.len() != len {
            return Err(CliError::usage(format!("--{flag} needs {len} comma-separated coordinates, got {}", c.len())));
        }
    }
    Ok(c)
}

fn complex(flag: &str, v: Option<&String>) -> CliResult<Complex64> {
    let c = coords(flag, v, Some(2))?;
    Ok(Complex64::new(c[0], c[1]))
}

fn space_point(flag: &str, v: Option<&String>, n: Option<usize>) -> CliResult<Vec<f64>> {
    let x = coords(flag, v, n)?;
    if !(3..=5).contains(&x.len()) {
        return Err(CliError::usage(format!("--{flag} needs 3 to 5 coordinates")));
    }
    Ok(x)
}

/// Kernel value; errors in the arguments and domain errors are usage errors.
pub fn evaluate(family: KernelFamily, a: &KernelArgs) -> CliResult<f64> {
    let m = a.m.unwrap_or(0);
    let t = || a.t.ok_or_else(|| CliError::usage("missing --t"));
    let v = match family {
        KernelFamily::Plane => pk::poisson_plane(complex("z", a.z.as_ref())?, t()?),
        KernelFamily::PlaneMod => pk::poisson_plane_mod(m, complex("z", a.z.as_ref())?, t()?),
        KernelFamily::GreenPlane => {
            let (z, zeta) = (complex("z", a.z.as_ref())?, complex("zeta", a.zeta.as_ref())?);
            match a.m {
                Some(m) => pk::green_plane_mod(m, z, zeta),
                None => pk::green_plane(z, zeta),
            }
        }
        KernelFamily::Space | KernelFamily::SpaceMod => {
            let x = space_point("x", a.x.as_ref(), a.n)?;
            let yp = coords("yp", a.yp.as_ref(), Some(x.len() - 1))?;
            if family == KernelFamily::Space {
                sk::poisson_space(&x, &yp)
            } else {
                sk::poisson_space_mod(m, &x, &yp)
            }
        }
        KernelFamily::GreenSpace => {
            let x = space_point("x", a.x.as_ref(), a.n)?;
            let y = coords("y", a.y.as_ref(), Some(x.len()))?;
            match a.m {
                Some(m) => sk::green_space_mod(m, &x, &y),
                None => sk::green_space(&x, &y),
            }
        }
    };
    v.map_err(|e| CliError::usage(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GegenbauerQuery {
    Value,
    Derivative,
    Max,
}

pub fn gegenbauer(lambda: f64, k: usize, t: Option<f64>, query: GegenbauerQuery) -> CliResult<f64> {
    let p = GegenbauerParam::new(lambda, k).map_err(|e| CliError::usage(e.to_string()))?;
    let t = || t.ok_or_else(|| CliError::usage("missing --t"));
    let v = match query {
        GegenbauerQuery::Value => gegenbauer_eval(p, t()?),
        GegenbauerQuery::Derivative => gegenbauer_derivative(p, t()?),
        GegenbauerQuery::Max => Ok(gegenbauer_max(p)),
    };
    v.map_err(|e| CliError::usage(e.to_string()))
}
