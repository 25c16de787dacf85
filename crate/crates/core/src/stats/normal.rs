//! Standard normal CDF via the Abramowitz–Stegun 7.1.26 erf approximation
//! (absolute error below 1.5e-7, ample for normal-approximation p-values).

pub fn phi(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_points() {
        assert!((phi(0.0) - 0.5).abs() < 1e-9);
        assert!((phi(1.959963985) - 0.975).abs() < 1e-6);
        assert!((phi(-1.0) - 0.15865525).abs() < 1e-6);
    }
}
