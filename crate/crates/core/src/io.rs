//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are lists of rows of
//! such pairs.
//!
//! ```text
//! graph:      {"vertices": ["1","2"], "edges": [{"name":"f","src":"1","rng":"2"}]}
//! rep:        {"multiplicity": {"1": 1, "2": 1}}
//! covrep:     {"multiplicity": {...}, "blocks": {"f": [[[0.5,0]]]}}
//! element:    {"a0": {"1": [1,0]}, "tensors": [{"degree":1, "entries": [[["f"], 1, 0]]}]}
//! point:      {"representation": {"multiplicity": {...}}, "blocks": {"f": [[[0.3,0]]]}}
//! points:     {"points": [point, ...]}
//! problem:    {"points": [point, ...], "B": [matrix, ...], "C": [matrix, ...]}
//! ```
//!
//! An element may instead of (or besides) `tensors` carry
//! `"geometric": {"weights": {edge: [re,im]}, "radius": r}`, the series
//! `sum_k xi^(x)k` with `xi = sum_e w_e delta_e`; `radius` is optional.
//! Covariant-rep blocks are `T(e)` (shape `m_rng x m_src`); point blocks are
//! `eta_e = T(e)*` (shape `m_src x m_rng`). Missing blocks are zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corr::{tensor, AlgebraElement, CorrTensor, DirectedGraph};
use crate::error::{Error, Result};
use crate::fock::HardyElement;
use crate::linalg::{Mat, C, ZERO};
use crate::pick::InterpolationProblem;
use crate::reps::{make_covariant, CovariantRep, DualPoint, Representation};

pub type Complex = [f64; 2];
pub type MatrixJson = Vec<Vec<Complex>>;

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub name: String,
    pub src: String,
    pub rng: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub multiplicity: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BTreeMap<String, MatrixJson>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub degree: usize,
    pub entries: Vec<(Vec<String>, f64, f64)>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct GeometricJson {
    pub weights: BTreeMap<String, Complex>,
    #[serde(default)]
    pub radius: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    #[serde(default)]
    pub a0: BTreeMap<String, Complex>,
    #[serde(default)]
    pub tensors: Vec<TensorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric: Option<GeometricJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub representation: RepJson,
    #[serde(default)]
    pub blocks: BTreeMap<String, MatrixJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PointsJson {
    pub points: Vec<PointJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub points: Vec<PointJson>,
    #[serde(rename = "B")]
    pub b: Vec<MatrixJson>,
    #[serde(rename = "C")]
    pub c: Vec<MatrixJson>,
}

/// Parses `text` into `T`; serde's message carries the line and column.
fn from_text<T: DeserializeOwned>(context: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.to_string(),
        message: e.to_string(),
    })
}

/// A semantic error at `field`, with the first line mentioning `needle`.
fn field_error(context: &str, text: &str, field: &str, needle: &str, what: impl std::fmt::Display) -> Error {
    let quoted = format!("\"{needle}\"");
    let line = text
        .lines()
        .position(|l| l.contains(&quoted))
        .map(|i| format!("line {}, ", i + 1))
        .unwrap_or_default();
    Error::Parse {
        context: context.to_string(),
        message: format!("{line}field {field}: {what}"),
    }
}

pub fn complex(z: Complex) -> C {
    C::new(z[0], z[1])
}

pub fn complex_json(z: C) -> Complex {
    [z.re, z.im]
}

pub fn matrix_from_json(m: &MatrixJson) -> std::result::Result<Mat, String> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    Ok(Mat::from_fn(rows, cols, |i, j| complex(m[i][j])))
}

pub fn matrix_to_json(m: &Mat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_value(m: &Mat) -> Value {
    serde_json::to_value(matrix_to_json(m)).expect("matrices serialize")
}

pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    let ctx = "graph";
    let raw: GraphJson = from_text(ctx, text)?;
    for (i, e) in raw.edges.iter().enumerate() {
        for (field, v) in [("src", &e.src), ("rng", &e.rng)] {
            if !raw.vertices.contains(v) {
                return Err(field_error(ctx, text, &format!("edges[{i}].{field}"), v, format!("unknown vertex {v:?}")));
            }
        }
    }
    DirectedGraph::new(
        raw.vertices.clone(),
        raw.edges.into_iter().map(|e| (e.name, e.src, e.rng)),
    )
    .map_err(|err| match &err {
        Error::Duplicate(name) => field_error(ctx, text, "vertices/edges", name, format!("duplicate name {name:?}")),
        _ => Error::Parse {
            context: ctx.into(),
            message: err.to_string(),
        },
    })
}

pub fn graph_to_json(g: &DirectedGraph) -> GraphJson {
    GraphJson {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeJson {
                name: e.name.clone(),
                src: g.vertices()[e.src].clone(),
                rng: g.vertices()[e.rng].clone(),
            })
            .collect(),
    }
}

fn rep_from_raw(ctx: &str, text: &str, raw: &RepJson, g: &Arc<DirectedGraph>) -> Result<Representation> {
    let mut mult = vec![0; g.num_vertices()];
    for (name, &m) in &raw.multiplicity {
        let v = g
            .vertex_id(name)
            .map_err(|_| field_error(ctx, text, "multiplicity", name, format!("unknown vertex {name:?}")))?;
        mult[v] = m;
    }
    Representation::new(g.clone(), mult)
}

/// Edge blocks keyed by edge name; `adjoint_shape` selects `m_src x m_rng`.
fn edge_blocks(
    ctx: &str,
    text: &str,
    raw: &BTreeMap<String, MatrixJson>,
    rep: &Representation,
    adjoint_shape: bool,
) -> Result<Vec<Mat>> {
    let g = rep.graph();
    let mut blocks: Vec<Mat> = g
        .edges()
        .iter()
        .map(|e| {
            let (r, c) = (rep.mult(e.rng), rep.mult(e.src));
            if adjoint_shape {
                Mat::zeros(c, r)
            } else {
                Mat::zeros(r, c)
            }
        })
        .collect();
    for (name, m) in raw {
        let field = format!("blocks.{name}");
        let e = g
            .edge_id(name)
            .map_err(|_| field_error(ctx, text, &field, name, format!("unknown edge {name:?}")))?;
        let m = matrix_from_json(m).map_err(|msg| field_error(ctx, text, &field, name, msg))?;
        let expected = blocks[e].shape();
        let empty_ok = m.nrows() == 0 && expected.0 * expected.1 == 0;
        if m.shape() != expected && !empty_ok {
            return Err(field_error(
                ctx,
                text,
                &field,
                name,
                format!("expected a {}x{} matrix, found {}x{}", expected.0, expected.1, m.nrows(), m.ncols()),
            ));
        }
        if !empty_ok {
            blocks[e] = m;
        }
    }
    Ok(blocks)
}

pub fn parse_representation(text: &str, g: &Arc<DirectedGraph>) -> Result<Representation> {
    let raw: RepJson = from_text("representation", text)?;
    rep_from_raw("representation", text, &raw, g)
}

pub fn parse_covariant(text: &str, g: &Arc<DirectedGraph>) -> Result<CovariantRep> {
    let ctx = "covariant representation";
    let raw: RepJson = from_text(ctx, text)?;
    let rep = rep_from_raw(ctx, text, &raw, g)?;
    let blocks = edge_blocks(ctx, text, &raw.blocks.clone().unwrap_or_default(), &rep, false)?;
    make_covariant(&rep, blocks).map_err(|e| Error::Parse {
        context: ctx.into(),
        message: e.to_string(),
    })
}

pub fn covariant_to_json(t: &CovariantRep) -> RepJson {
    let rep = t.rep();
    let g = rep.graph();
    RepJson {
        multiplicity: rep_multiplicity(rep),
        blocks: Some(
            g.edges()
                .iter()
                .enumerate()
                .map(|(e, edge)| (edge.name.clone(), matrix_to_json(t.block(e))))
                .collect(),
        ),
    }
}

fn rep_multiplicity(rep: &Representation) -> BTreeMap<String, usize> {
    rep.graph()
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, name)| (name.clone(), rep.mult(v)))
        .collect()
}

fn point_from_raw(ctx: &str, text: &str, raw: &PointJson, g: &Arc<DirectedGraph>) -> Result<DualPoint> {
    let rep = rep_from_raw(ctx, text, &raw.representation, g)?;
    let blocks = edge_blocks(ctx, text, &raw.blocks, &rep, true)?;
    DualPoint::new(&rep, blocks)
}

pub fn point_to_json(p: &DualPoint) -> PointJson {
    PointJson {
        representation: RepJson {
            multiplicity: rep_multiplicity(p.rep()),
            blocks: None,
        },
        blocks: p
            .graph()
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| (edge.name.clone(), matrix_to_json(p.block(e))))
            .collect(),
    }
}

/// Accepts a single point object or `{"points": [...]}`.
pub fn parse_points(text: &str, g: &Arc<DirectedGraph>) -> Result<Vec<DualPoint>> {
    let ctx = "points";
    let value: Value = from_text(ctx, text)?;
    let raws: Vec<PointJson> = if value.get("points").is_some() {
        from_text::<PointsJson>(ctx, text)?.points
    } else {
        vec![from_text::<PointJson>(ctx, text)?]
    };
    raws.iter()
        .map(|p| point_from_raw(ctx, text, p, g))
        .collect()
}

pub fn parse_problem(text: &str, g: &Arc<DirectedGraph>) -> Result<InterpolationProblem> {
    let ctx = "problem";
    let raw: ProblemJson = from_text(ctx, text)?;
    let points = raw
        .points
        .iter()
        .map(|p| point_from_raw(ctx, text, p, g))
        .collect::<Result<Vec<_>>>()?;
    let mats = |list: &[MatrixJson], name: &str| -> Result<Vec<Mat>> {
        list.iter()
            .enumerate()
            .map(|(i, m)| {
                matrix_from_json(m).map_err(|msg| Error::Parse {
                    context: ctx.into(),
                    message: format!("field {name}[{i}]: {msg}"),
                })
            })
            .collect()
    };
    let b = mats(&raw.b, "B")?;
    let c = mats(&raw.c, "C")?;
    InterpolationProblem::new(points, b, c)
}

pub fn problem_to_json(p: &InterpolationProblem) -> ProblemJson {
    ProblemJson {
        points: p.points.iter().map(point_to_json).collect(),
        b: p.b.iter().map(matrix_to_json).collect(),
        c: p.c.iter().map(matrix_to_json).collect(),
    }
}

pub fn parse_element(text: &str, g: &Arc<DirectedGraph>) -> Result<HardyElement> {
    let ctx = "element";
    let raw: ElementJson = from_text(ctx, text)?;
    let mut a0 = AlgebraElement::zero(g.num_vertices());
    for (name, z) in &raw.a0 {
        let v = g
            .vertex_id(name)
            .map_err(|_| field_error(ctx, text, "a0", name, format!("unknown vertex {name:?}")))?;
        a0.0[v] = complex(*z);
    }
    let max_deg = raw.tensors.iter().map(|t| t.degree).max().unwrap_or(0);
    let mut tensors: Vec<CorrTensor> = (1..=max_deg).map(|k| CorrTensor::zero(g, k)).collect();
    for (i, t) in raw.tensors.iter().enumerate() {
        let field = format!("tensors[{i}]");
        if t.degree == 0 {
            for (names, re, im) in &t.entries {
                let p = g.path_from_names(names).map_err(|e| Error::Parse {
                    context: ctx.into(),
                    message: format!("field {field}: {e}"),
                })?;
                a0.0[p.rng()] += C::new(*re, *im);
            }
            continue;
        }
        let mut entries = Vec::new();
        for (j, (names, re, im)) in t.entries.iter().enumerate() {
            let p = g.path_from_names(names).map_err(|e| {
                let needle = names.first().cloned().unwrap_or_default();
                field_error(ctx, text, &format!("{field}.entries[{j}]"), &needle, e)
            })?;
            entries.push((p, C::new(*re, *im)));
        }
        let add = CorrTensor::from_entries(g, t.degree, entries).map_err(|e| Error::Parse {
            context: ctx.into(),
            message: format!("field {field}: {e}"),
        })?;
        let slot = &mut tensors[t.degree - 1];
        *slot = slot.try_add(&add)?;
    }
    let poly = HardyElement::polynomial(g.clone(), a0.clone(), tensors)?;
    let Some(geo) = raw.geometric else {
        return Ok(poly);
    };
    let mut xi = CorrTensor::zero(g, 1);
    for (name, w) in &geo.weights {
        let e = g
            .edge_id(name)
            .map_err(|_| field_error(ctx, text, "geometric.weights", name, format!("unknown edge {name:?}")))?;
        xi = xi.try_add(&CorrTensor::delta_edge(g, e).scale(complex(*w)))?;
    }
    let n = g.num_vertices();
    let gg = g.clone();
    let series = HardyElement::from_rule(g.clone(), AlgebraElement::zero(n), move |k| {
        let mut t = xi.clone();
        for _ in 1..k {
            t = tensor(&t, &xi);
        }
        if k == 0 {
            CorrTensor::zero(&gg, 0)
        } else {
            t
        }
    });
    let series = match geo.radius {
        Some(r) => series.with_radius(r),
        None => series,
    };
    Ok(series.add(&poly))
}

/// Serializes a polynomial element; `None` for rule-defined series.
pub fn element_to_json(theta: &HardyElement) -> Option<ElementJson> {
    let g = theta.graph();
    let deg = theta.degree()?;
    let a0 = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|(v, _)| theta.a0().0[*v] != ZERO)
        .map(|(v, name)| (name.clone(), complex_json(theta.a0().0[v])))
        .collect();
    let tensors = (1..=deg)
        .map(|k| {
            let t = theta.tensor(k);
            TensorJson {
                degree: k,
                entries: t
                    .entries()
                    .filter(|(_, z)| **z != ZERO)
                    .map(|(p, z)| {
                        let names = p.edges().iter().map(|&e| g.edge(e).name.clone()).collect();
                        (names, z.re, z.im)
                    })
                    .collect(),
            }
        })
        .collect();
    Some(ElementJson {
        a0,
        tensors,
        geometric: None,
    })
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;

    const C2: &str = r#"{
  "vertices": ["1", "2"],
  "edges": [
    {"name": "f", "src": "1", "rng": "2"},
    {"name": "g", "src": "2", "rng": "1"}
  ]
}"#;

    fn c2() -> Arc<DirectedGraph> {
        Arc::new(parse_graph(C2).unwrap())
    }

    #[test]
    fn graph_roundtrip() {
        let g = c2();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edge(0).rng, 1);
        let back = parse_graph(&to_pretty(&graph_to_json(&g))).unwrap();
        assert_eq!(*g, back);
    }

    #[test]
    fn graph_errors_cite_line_and_field() {
        let bad = C2.replace("\"rng\": \"1\"", "\"rng\": \"x\"");
        let msg = parse_graph(&bad).unwrap_err().to_string();
        assert!(msg.contains("line 5") && msg.contains("edges[1].rng"), "{msg}");
        let msg = parse_graph("{\n \"vertices\": [1]\n}").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let dup = C2.replace("\"name\": \"g\"", "\"name\": \"f\"");
        assert!(parse_graph(&dup).unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn covariant_and_point_shapes() {
        let g = c2();
        let t = parse_covariant(
            r#"{"multiplicity": {"1": 1, "2": 2}, "blocks": {"f": [[[1,0]],[[0,1]]]}}"#,
            &g,
        )
        .unwrap();
        assert_eq!(t.block(0).shape(), (2, 1));
        assert_eq!(t.block(1).shape(), (1, 2));
        let back = parse_covariant(&to_pretty(&covariant_to_json(&t)), &g).unwrap();
        assert_eq!(back.block(0), t.block(0));
        let err = parse_covariant(r#"{"multiplicity": {"1": 1, "2": 2}, "blocks": {"f": [[[1,0]]]}}"#, &g);
        assert!(err.unwrap_err().to_string().contains("blocks.f"));
        let pts = parse_points(
            r#"{"points": [{"representation": {"multiplicity": {"1": 1, "2": 2}}, "blocks": {"f": [[[1,0],[0,0]]]}}]}"#,
            &g,
        )
        .unwrap();
        assert_eq!(pts[0].block(0).shape(), (1, 2));
    }

    #[test]
    fn element_roundtrip_and_evaluation() {
        let g = c2();
        let text = r#"{"a0": {"1": [2, 0]}, "tensors": [{"degree": 2, "entries": [[["g", "f"], 1, 0]]}]}"#;
        let theta = parse_element(text, &g).unwrap();
        assert_eq!(theta.degree(), Some(2));
        let back = parse_element(&to_pretty(&element_to_json(&theta).unwrap()), &g).unwrap();
        assert_eq!(back.tensor(2).distance(&theta.tensor(2)), 0.0);
        let bad = parse_element(r#"{"tensors": [{"degree": 2, "entries": [[["f", "f"], 1, 0]]}]}"#, &g);
        assert!(bad.unwrap_err().to_string().contains("tensors[0].entries[0]"));
    }

    #[test]
    fn geometric_series_element() {
        let g = Arc::new(DirectedGraph::free(1));
        let theta = parse_element(r#"{"geometric": {"weights": {"e1": [1, 0]}, "radius": 1.0}}"#, &g).unwrap();
        let rep = Representation::uniform(g.clone(), 1);
        let p = DualPoint::scalar(&rep, &[C::new(0.5, 0.0)]).unwrap();
        let v = evaluate(&theta, &p, 1e-12).unwrap();
        assert!((v.value[(0, 0)].re - 1.0).abs() < 1e-10);
        let far = DualPoint::scalar(&rep, &[C::new(1.5, 0.0)]).unwrap();
        assert!(matches!(evaluate(&theta, &far, 1e-12), Err(Error::RadiusExceeded { .. })));
    }

    #[test]
    fn problem_parses() {
        let g = Arc::new(DirectedGraph::free(1));
        let text = r#"{"points": [{"representation": {"multiplicity": {"o": 1}}, "blocks": {"e1": [[[0,0]]]}}],
                       "B": [[[[1,0]]]], "C": [[[[0.5,0]]]]}"#;
        let p = parse_problem(text, &g).unwrap();
        assert_eq!(p.points.len(), 1);
        let back = parse_problem(&to_pretty(&problem_to_json(&p)), &g).unwrap();
        assert_eq!(back.c[0], p.c[0]);
    }
}
