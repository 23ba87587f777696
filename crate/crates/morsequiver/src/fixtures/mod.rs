//! Named surfaces with PL height functions used as test and demo inputs.

mod builder;
mod quivers;
mod surfaces;

pub use builder::{Loop, SurfaceBuilder};
pub use quivers::{bott_quiver, build_quiver, gamma, gamma_data, search_gamma, PathData, QUIVER_NAMES};
pub use surfaces::{
    genus2, hexagon_chart, saddle_chart, sphere, torus_bott, torus_degenerate, torus_standard, Resolution,
};

use crate::error::{Error, Result};
use crate::scalarfield::ScalarField;

/// Names accepted by [`build`].
pub const SURFACE_NAMES: &[&str] = &[
    "sphere",
    "torus_standard",
    "torus_axisymmetric",
    "torus_degenerate",
    "torus_bott",
    "genus2",
    "hexagon_chart",
    "saddle_chart",
];

/// Builds a named surface fixture.
pub fn build(name: &str, res: Resolution) -> Result<ScalarField> {
    res.validate().map_err(Error::Invalid)?;
    Ok(match name {
        "sphere" => sphere(res),
        "torus_standard" => torus_standard(res, false),
        "torus_axisymmetric" => torus_standard(res, true),
        "torus_degenerate" => torus_degenerate(res),
        "torus_bott" => torus_bott(res),
        "genus2" => genus2(res),
        "hexagon_chart" => hexagon_chart(res),
        "saddle_chart" => saddle_chart(res),
        _ => return Err(Error::Invalid(format!("unknown fixture {name:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{homology, ChainComplex, FieldTag};
    use crate::scalarfield::{classify_vertices, CriticalKind};

    fn kinds(name: &str) -> Vec<CriticalKind> {
        let sf = build(name, Resolution::default()).unwrap();
        classify_vertices(&sf).unwrap().components.iter().map(|c| c.kind).collect()
    }

    fn betti(name: &str) -> Vec<u64> {
        let sf = build(name, Resolution::default()).unwrap();
        homology(&ChainComplex::of_complex(&sf.complex, FieldTag::F2), FieldTag::F2)
            .coefficients()
            .to_vec()
    }

    #[test]
    fn fixture_topology() {
        assert_eq!(betti("sphere"), vec![1, 0, 1]);
        for t in ["torus_standard", "torus_axisymmetric", "torus_degenerate", "torus_bott"] {
            assert_eq!(betti(t), vec![1, 2, 1], "{t}");
        }
        assert_eq!(betti("genus2"), vec![1, 4, 1]);
        assert_eq!(betti("hexagon_chart"), vec![1]);
        assert_eq!(betti("saddle_chart"), vec![1]);
    }

    #[test]
    fn fixture_critical_kinds() {
        use CriticalKind::*;
        assert_eq!(kinds("sphere"), vec![Min, Max]);
        assert_eq!(kinds("torus_standard"), vec![Min, Saddle(1), Saddle(1), Max]);
        assert_eq!(kinds("torus_axisymmetric"), vec![Min, Saddle(1), Saddle(1), Max]);
        assert_eq!(kinds("torus_degenerate"), vec![Min, Degenerate(2), Max, Saddle(1), Max]);
        assert_eq!(kinds("torus_bott"), vec![BottCircleMin, BottCircleMax]);
        assert_eq!(
            kinds("genus2"),
            vec![Min, Min, Degenerate(2), Saddle(1), BottCircleMax, Saddle(1), BottCircleMax]
        );
        assert_eq!(kinds("hexagon_chart"), vec![Degenerate(2)]);
        assert_eq!(kinds("saddle_chart"), vec![Saddle(1)]);
    }

    #[test]
    fn unknown_fixture_is_rejected() {
        assert!(build("klein", Resolution::default()).is_err());
    }
}
