//! Unit conversions. Everything inside the crate is an angular frequency in
//! rad/s; configuration files and CSV output use GHz and MHz.

use std::f64::consts::TAU;

pub fn ghz(f: f64) -> f64 {
    TAU * 1e9 * f
}

pub fn mhz(f: f64) -> f64 {
    TAU * 1e6 * f
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / (TAU * 1e9)
}

pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert!((to_ghz(ghz(9.4)) - 9.4).abs() < 1e-12);
        assert!((to_mhz(mhz(-220.0)) + 220.0).abs() < 1e-12);
        assert!((to_mhz(ghz(1.0)) - 1000.0).abs() < 1e-9);
    }
}
