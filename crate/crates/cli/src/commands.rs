use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use confint_core::config::Limits;
use confint_core::diagram_algebra::{
    default_xi, dim_bounded, parse_rational, reduce, theta_class, AlgebraElement, AlgebraElementJson,
};
use confint_core::diagram_core::{
    count_automorphisms, enumerate_labelled_bounded, generate_diagrams_bounded, labelled_count_formula,
    parse_diagram, JacobiDiagram,
};
use confint_core::face_combinatorics::{cancellation_report, enumerate_faces, face_count_formula, Ambient};
use confint_core::fmc_charts::{roundtrip_sweep, validate_tree, NestedTree, Variant};
use confint_core::numeric_geometry::linking::{hopf_pair, split_pair};
use confint_core::numeric_geometry::propagator::{limit_check, ConfigPair};
use confint_core::numeric_geometry::{
    framing_correct, gauss_linking, map_degree, matrix_identity_report, named, FramedSeries, LinkJson, NamedMap,
    ParametricCurve,
};
use confint_core::{rng, Error, Result};

use crate::args::*;
use crate::report::Report;

/// Tolerance of the matrix checks.
pub const MATRIX_TOL: f64 = 1e-12;
/// Tolerance of the chart round trip.
pub const ROUNDTRIP_TOL: f64 = 1e-9;
/// Tolerance of the propagator limits.
pub const LIMIT_TOL: f64 = 1e-5;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

/// An algebra element, given bare or as the `element` or `series` field of
/// a report.
fn read_element(path: &Path) -> Result<AlgebraElement> {
    let v: serde_json::Value = from_json(path)?;
    let inner = match v.get("element").or_else(|| v.get("series")) {
        Some(x) if v.get("schema_version").is_some() => x.clone(),
        _ => v,
    };
    let j: AlgebraElementJson =
        serde_json::from_value(inner).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    AlgebraElement::from_json(&j)
}

pub fn run(cmd: &Command) -> Result<Report> {
    let limits = Limits::from_env();
    match cmd {
        Command::Diagrams(c) => diagrams(c, &limits),
        Command::Algebra(c) => algebra(c, &limits),
        Command::Faces(c) => faces(c, &limits),
        Command::Charts(c) => charts(c),
        Command::Geom(c) => geom(c),
        Command::Invariant(c) => invariant(c),
    }
}

fn builtin(b: Builtin) -> JacobiDiagram {
    match b {
        Builtin::Theta => JacobiDiagram::theta(),
        Builtin::K4 => JacobiDiagram::k4(),
        Builtin::DoubledSquare => JacobiDiagram::doubled_square(),
        Builtin::ThetaTheta => JacobiDiagram::theta_theta(),
    }
}

fn diagrams(c: &DiagramsCmd, limits: &Limits) -> Result<Report> {
    match c {
        DiagramsCmd::Gen { degree, all } => {
            let ds = generate_diagrams_bounded(*degree, !all, limits.max_degree)?;
            Ok(Report::new(
                "diagrams gen",
                json!({"degree": degree, "connected": !all, "max_degree": limits.max_degree}),
                json!({
                    "count": ds.len(),
                    "diagrams": ds.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
                }),
                true,
            ))
        }
        DiagramsCmd::Aut(src) => {
            let (g, source) = match (&src.input, src.builtin) {
                (Some(p), _) => (parse_diagram(&read(p)?)?, json!({"input": p})),
                (None, Some(b)) => (builtin(b), json!({"builtin": b})),
                (None, None) => unreachable!("clap requires one source"),
            };
            Ok(Report::new(
                "diagrams aut",
                source,
                json!({"degree": g.degree(), "automorphisms": count_automorphisms(&g).to_string()}),
                true,
            ))
        }
        DiagramsCmd::Labelled { degree } => {
            let formula = labelled_count_formula(*degree)?;
            let enumerated = enumerate_labelled_bounded(*degree, limits.max_labelled_degree)?.len();
            let agree = formula == enumerated.into();
            Ok(Report::new(
                "diagrams labelled",
                json!({"degree": degree, "max_labelled_degree": limits.max_labelled_degree}),
                json!({"enumerated": enumerated, "formula": formula.to_string(), "agree": agree}),
                agree,
            ))
        }
    }
}

fn element(src: &ElementSource) -> Result<(AlgebraElement, serde_json::Value)> {
    match (&src.input, &src.theta) {
        (Some(p), _) => Ok((read_element(p)?, json!({"input": p}))),
        (None, Some(c)) => {
            let q = parse_rational(c)?;
            Ok((theta_class(src.bound).scale(&q), json!({"theta": c, "bound": src.bound})))
        }
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn algebra(c: &AlgebraCmd, limits: &Limits) -> Result<Report> {
    match c {
        AlgebraCmd::Dim { degree } => Ok(Report::new(
            "algebra dim",
            json!({"degree": degree, "max_degree": limits.max_degree}),
            json!({"dim": dim_bounded(*degree, limits.max_degree)?}),
            true,
        )),
        AlgebraCmd::Reduce(src) => {
            let (x, config) = element(src)?;
            let r = reduce(&x);
            Ok(Report::new(
                "algebra reduce",
                config,
                json!({"element": r.to_json(), "is_zero": r.is_zero()}),
                true,
            ))
        }
        AlgebraCmd::Exp(src) => {
            let (x, config) = element(src)?;
            Ok(Report::new("algebra exp", config, json!({"element": x.exp_truncated()?.to_json()}), true))
        }
    }
}

fn faces(c: &FacesCmd, limits: &Limits) -> Result<Report> {
    match c {
        FacesCmd::Enumerate { points, ambient } => {
            let a = match ambient {
                AmbientArg::Cv => Ambient::CV,
                AmbientArg::Sv => Ambient::SV,
            };
            let fs = enumerate_faces(*points, a)?;
            let formula = face_count_formula(*points, a);
            Ok(Report::new(
                "faces enumerate",
                json!({"points": points, "ambient": ambient}),
                json!({"count": fs.len(), "formula": formula, "faces": fs}),
                fs.len() == formula,
            ))
        }
        FacesCmd::Check { degree } => {
            if !(1..=2).contains(degree) {
                return Err(Error::DegreeTooLarge { degree: *degree, bound: 2 });
            }
            let r = cancellation_report(*degree, limits.max_labelled_degree)?;
            let ok = r.is_ok();
            Ok(Report::new("faces check", json!({"degree": degree}), r, ok))
        }
    }
}

fn charts(c: &ChartsCmd) -> Result<Report> {
    match c {
        ChartsCmd::Roundtrip { seed, instances, variant } => {
            let v = match variant {
                VariantArg::Finite => Variant::Finite,
                VariantArg::Infinity => Variant::Infinity,
            };
            let r = roundtrip_sweep(*seed, *instances, v)?;
            let ok = r.max_residual < ROUNDTRIP_TOL && r.codim_consistent;
            Ok(Report::new(
                "charts roundtrip",
                json!({"seed": seed, "instances": instances, "variant": variant, "tolerance": ROUNDTRIP_TOL}),
                r,
                ok,
            ))
        }
        ChartsCmd::Validate { input } => {
            let t: NestedTree = from_json(input)?;
            let v = validate_tree(&t);
            let ok = v.valid;
            Ok(Report::new("charts validate", json!({"input": input}), v, ok))
        }
    }
}

fn named_map(m: MapArg) -> NamedMap {
    match m {
        MapArg::Identity => NamedMap::Identity,
        MapArg::Constant => NamedMap::Constant,
        MapArg::Square => NamedMap::Square,
        MapArg::Rho => NamedMap::Rho,
        MapArg::RhoSquared => NamedMap::RhoSquared,
        MapArg::G3 => NamedMap::G3,
    }
}

fn link(spec: &str) -> Result<(ParametricCurve, ParametricCurve)> {
    match spec {
        "hopf" => Ok(hopf_pair()),
        "split" => Ok(split_pair()),
        path => {
            let j: LinkJson = from_json(Path::new(path))?;
            if j.components.len() != 2 {
                return Err(Error::MalformedInput(format!(
                    "a link needs exactly 2 components, found {}",
                    j.components.len()
                )));
            }
            Ok((
                ParametricCurve::from_json(&j.components[0])?,
                ParametricCurve::from_json(&j.components[1])?,
            ))
        }
    }
}

#[derive(Serialize)]
struct PropagatorSummary {
    /// Largest final residual per boundary type.
    max_last_residual: BTreeMap<&'static str, f64>,
    converged: bool,
}

fn geom(c: &GeomCmd) -> Result<Report> {
    match c {
        GeomCmd::Degree { map, samples, seed } => {
            let d = map_degree(&named(named_map(*map)), *samples, *seed)?;
            Ok(Report::new(
                "geom degree",
                json!({"map": map, "samples": samples, "seed": seed}),
                d,
                true,
            ))
        }
        GeomCmd::Linking { link: spec, nodes, repeat } => {
            let (a, b) = link(spec)?;
            let b = if *repeat == 1 { b } else { b.repeated(*repeat) };
            let l = gauss_linking(&a, &b, *nodes)?;
            Ok(Report::new(
                "geom linking",
                json!({"link": spec, "nodes": nodes, "repeat": repeat}),
                l,
                true,
            ))
        }
        GeomCmd::G3check { samples, seed } => {
            let r = matrix_identity_report(*seed, *samples);
            let ok = r.g3_with_inverse < MATRIX_TOL && r.g3_stereographic < MATRIX_TOL;
            Ok(Report::new(
                "geom g3check",
                json!({"samples": samples, "seed": seed, "tolerance": MATRIX_TOL}),
                json!({
                    "conjugator": "P13 rho^-1 P13^-1",
                    "residual": r.g3_with_inverse,
                    "residual_without_inverse_min": r.g3_without_inverse_min,
                    "stereographic_residual": r.g3_stereographic,
                    "rho_closed_form_residual": r.rho_closed_form,
                    "rho_homomorphism_residual": r.rho_homomorphism,
                }),
                ok,
            ))
        }
        GeomCmd::Cmrcheck { samples, seed } => {
            let r = matrix_identity_report(*seed, *samples);
            let ok = r.cmr_block < MATRIX_TOL && r.cmr_upper_block < MATRIX_TOL;
            Ok(Report::new(
                "geom cmrcheck",
                json!({"samples": samples, "seed": seed, "tolerance": MATRIX_TOL}),
                json!({"residual": r.cmr_block, "upper_block_residual": r.cmr_upper_block}),
                ok,
            ))
        }
        GeomCmd::Propagator { samples, seed } => {
            use rand::Rng;
            let mut r = rng::master(*seed);
            let mut max_last: BTreeMap<&'static str, f64> = BTreeMap::new();
            let mut converged = true;
            for _ in 0..*samples {
                let mut v = || {
                    nalgebra::Vector3::new(
                        r.random_range(-2.0..2.0),
                        r.random_range(-2.0..2.0),
                        r.random_range(-2.0..2.0),
                    )
                };
                let (x, y) = (v(), v());
                for p in [
                    ConfigPair::Diagonal { x, u: y },
                    ConfigPair::InfinityFirst { x, y },
                    ConfigPair::InfinitySecond { x, y },
                    ConfigPair::BothInfinity { x, y },
                    ConfigPair::DiagonalAtInfinity { x, y },
                ] {
                    let c = limit_check(&p, 0.01, 0.1, 8)?;
                    converged &= c.converged(LIMIT_TOL);
                    let e = max_last.entry(c.kind).or_insert(0.0);
                    *e = e.max(c.last_residual());
                }
            }
            Ok(Report::new(
                "geom propagator",
                json!({"samples": samples, "seed": seed, "tolerance": LIMIT_TOL, "sequence": "0.01 * 0.1^k, k < 8"}),
                PropagatorSummary { max_last_residual: max_last, converged },
                converged,
            ))
        }
    }
}

fn invariant(c: &InvariantCmd) -> Result<Report> {
    match c {
        InvariantCmd::Frame { p1, z, bound, integral_sphere } => {
            let series = match z {
                Some(p) => read_element(p)?,
                None => AlgebraElement::one(*bound),
            };
            let xi = default_xi(series.bound());
            let fs = FramedSeries::new(series, *p1, *integral_sphere)?;
            let out = framing_correct(&fs, &xi)?;
            let theta = theta_class(out.bound());
            let (g, unit) = theta.terms().iter().next().expect("theta is nonzero");
            let coeff = out.coefficient(g) / unit;
            Ok(Report::new(
                "invariant frame",
                json!({"p1": p1, "z": z, "bound": fs.z.bound(), "integral_sphere": integral_sphere, "xi": "-1/12 [theta]"}),
                json!({
                    "series": out.to_json(),
                    "theta_coefficient": format!("{}/{}", coeff.numer(), coeff.denom()),
                }),
                true,
            ))
        }
    }
}
