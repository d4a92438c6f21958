//! Built-in test functions, looked up by name.

use mellin_core::numerics::plane::{ModeTerm, SFactor, TestFunction};
use mellin_core::numerics::ray::ExpLaurent;
use mellin_core::{Error, Result};
use num_complex::Complex64;

use crate::config::RunConfig;

fn unknown(name: &str, known: &str) -> Error {
    Error::InvalidInput(format!("unknown function '{name}' (known: {known})"))
}

fn parse_number(name: &str, text: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidInput(format!("bad parameter in '{name}'")))
}

/// Functions on the positive ray: `exponential[:rate]`, `gaussian`, `bessel`, `zero`, `custom`.
pub fn ray_function(name: &str, config: &RunConfig) -> Result<ExpLaurent> {
    const KNOWN: &str = "exponential, exponential:<rate>, gaussian, bessel, zero, custom";
    match name {
        "exponential" => Ok(ExpLaurent::exponential(1.0)),
        "gaussian" => Ok(ExpLaurent::gaussian()),
        "bessel" => Ok(ExpLaurent::bessel()),
        "zero" => Ok(ExpLaurent::zero()),
        "custom" => config
            .ray_function
            .as_ref()
            .map(|s| s.to_function())
            .ok_or_else(|| Error::InvalidInput("function 'custom' needs [ray_function] in the config".into())),
        _ => match name.strip_prefix("exponential:") {
            Some(rate) => Ok(ExpLaurent::exponential(parse_number(name, rate)?)),
            None => Err(unknown(name, KNOWN)),
        },
    }
}

/// `e^{−r−1/r} Σ_{m=−6}^{7} c_m (ξ/|ξ|)^m` with polynomial and exponential s-factors.
pub fn separable() -> TestFunction {
    let c = |x: f64| Complex64::new(x, 0.0);
    let terms = (-6..=7)
        .map(|m| {
            let mut t = ModeTerm::envelope(Complex64::new(1.0 / (1.0 + (m * m) as f64), 0.1 * m as f64), m);
            t.s_factor = match m.rem_euclid(3) {
                0 => Some(SFactor { rate: c(0.5), poly: vec![c(1.0)] }),
                1 => Some(SFactor { rate: c(0.0), poly: vec![c(1.0), c(-0.5), c(0.25)] }),
                _ => None,
            };
            t
        })
        .collect();
    TestFunction::from_terms(terms)
}

/// Functions on `C*`: `radial-mode<m>`, `separable`, `zero`, `custom`.
pub fn plane_function(name: &str, config: &RunConfig) -> Result<TestFunction> {
    const KNOWN: &str = "radial-mode<m>, separable, zero, custom";
    match name {
        "zero" => Ok(TestFunction::zero()),
        "separable" => Ok(separable()),
        "custom" => config
            .plane_function
            .clone()
            .ok_or_else(|| Error::InvalidInput("function 'custom' needs [plane_function] in the config".into())),
        _ => match name.strip_prefix("radial-mode") {
            Some(m) => m
                .parse::<i32>()
                .map(TestFunction::radial_mode)
                .map_err(|_| Error::InvalidInput(format!("bad mode in '{name}'"))),
            None => Err(unknown(name, KNOWN)),
        },
    }
}

/// A two-argument function `(t, T)` for the parameter expansion.
pub struct ExpansionFamily {
    pub eval: Box<dyn Fn(Complex64, Complex64) -> Complex64 + Sync>,
    /// `c` when the family is `t^c·w(T)`, which `t∂_t − c` annihilates.
    pub euler_exponent: Option<f64>,
}

/// `geometric` = `e^{−t}/(1−T)`, `linear` = `e^{−t}·T`, `power:<c>` = `t^c·e^T/(2−T)`.
pub fn expansion_family(name: &str) -> Result<ExpansionFamily> {
    const KNOWN: &str = "geometric, linear, power:<c>";
    let (eval, euler_exponent): (Box<dyn Fn(Complex64, Complex64) -> Complex64 + Sync>, _) = match name {
        "geometric" => (Box::new(|t: Complex64, big_t: Complex64| (-t).exp() / (1.0 - big_t)), None),
        "linear" => (Box::new(|t: Complex64, big_t: Complex64| (-t).exp() * big_t), None),
        _ => match name.strip_prefix("power:") {
            Some(c) => {
                let c = parse_number(name, c)?;
                (Box::new(move |t: Complex64, big_t: Complex64| t.powf(c) * big_t.exp() / (2.0 - big_t)), Some(c))
            }
            None => return Err(unknown(name, KNOWN)),
        },
    };
    Ok(ExpansionFamily { eval, euler_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        let c = RunConfig::default();
        assert_eq!(ray_function("exponential:2", &c).unwrap(), ExpLaurent::exponential(2.0));
        assert!(ray_function("exponential:x", &c).is_err());
        assert!(ray_function("custom", &c).is_err());
        assert_eq!(plane_function("radial-mode-3", &c).unwrap(), TestFunction::radial_mode(-3));
        assert!(plane_function("radial-modex", &c).is_err());
        assert_eq!(expansion_family("power:2.5").unwrap().euler_exponent, Some(2.5));
        assert!(expansion_family("cubic").is_err());
    }
}
