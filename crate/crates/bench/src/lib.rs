//! Fixtures shared by the benchmarks.

use tailgf::OffspringLaw;

/// Laws covering the closed-form kernel classes and the general route.
pub fn fixtures() -> Vec<(&'static str, OffspringLaw)> {
    vec![
        (
            "binary",
            OffspringLaw::finite(vec![0.4, 0.0, 0.4], 0.2).unwrap(),
        ),
        ("cubic", OffspringLaw::trifurcation(0.3, 0.3, 0.2).unwrap()),
        (
            "mlf",
            OffspringLaw::mlf_from_shape(0.5, 2.0, 0.6, 0.5).unwrap(),
        ),
        (
            "power_fractional",
            OffspringLaw::power_fractional(0.5, 2.0, 0.5, 0.5).unwrap(),
        ),
    ]
}
