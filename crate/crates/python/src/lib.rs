use std::time::{Duration, Instant};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use packpaint_core::exact::{self, SearchBudget, Verdict};
use packpaint_core::gen::GenSpec;
use packpaint_core::graph;
use packpaint_core::io::{self, ColoringReport};
use packpaint_core::packing::{ColorClass, PackingColoring, PackingSequence};
use packpaint_core::pipelines::{self, PipelineError, PipelineKind, PipelineOptions};
use packpaint_core::verify::Violation;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Simple undirected graph on vertices `0..n`.
#[pyclass(frozen, module = "packpaint")]
struct Graph {
    inner: graph::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = graph::Graph::from_edges(n, &edges).map_err(value_error)?;
        Ok(Graph { inner })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        parse_edge_list(text)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.n() {
            return Err(value_error(format!("vertex {v} out of range")));
        }
        Ok(self.inner.degree(v))
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn to_edge_list(&self) -> String {
        io::write_edge_list(&self.inner)
    }

    fn digest(&self) -> String {
        io::graph_digest(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyfunction]
fn parse_edge_list(text: &str) -> PyResult<Graph> {
    let inner = io::parse_edge_list(text).map_err(value_error)?;
    Ok(Graph { inner })
}

/// Builds a named graph family: `gkt`, `bridge`, `petersen`, `path`,
/// `cycle`, `complete`, `random` or `random-sat`.
#[pyfunction]
#[pyo3(signature = (kind, *, k=None, t=None, n=None, seed=0))]
fn generate(
    kind: &str,
    k: Option<usize>,
    t: Option<usize>,
    n: Option<usize>,
    seed: u64,
) -> PyResult<Graph> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| value_error(format!("`{name}` is required for {kind}")))
    };
    let spec = match kind {
        "gkt" => GenSpec::Gkt {
            k: need(k, "k")?,
            t: need(t, "t")?,
        },
        "bridge" => GenSpec::CliqueBridge { k: need(k, "k")? },
        "petersen" => GenSpec::Petersen,
        "path" => GenSpec::Path { n: need(n, "n")? },
        "cycle" => GenSpec::Cycle { n: need(n, "n")? },
        "complete" => GenSpec::Complete { n: need(n, "n")? },
        "random" => GenSpec::RandomDegreeBounded {
            n: need(n, "n")?,
            k: need(k, "k")?,
            seed,
        },
        "random-sat" => GenSpec::RandomSaturated {
            n: need(n, "n")?,
            k: need(k, "k")?,
            t: need(t, "t")?,
            seed,
        },
        other => return Err(value_error(format!("unknown graph kind `{other}`"))),
    };
    let inner = spec.build().map_err(value_error)?;
    Ok(Graph { inner })
}

/// Colors `graph` and returns the JSON report as a string.
#[pyfunction]
#[pyo3(signature = (graph, pipeline="auto", seed=0, timings=false))]
fn color(
    py: Python<'_>,
    graph: &Graph,
    pipeline: &str,
    seed: u64,
    timings: bool,
) -> PyResult<String> {
    let kind = match pipeline {
        "auto" => None,
        "deg2" => Some(PipelineKind::Deg2),
        "zero" => Some(PipelineKind::ZeroSaturated),
        "mid" => Some(PipelineKind::MidSaturated),
        "high" => Some(PipelineKind::HighSaturated),
        "general" => Some(PipelineKind::General),
        other => return Err(value_error(format!("unknown pipeline `{other}`"))),
    };
    let g = &graph.inner;
    let opts = PipelineOptions::with_seed(seed);
    let start = Instant::now();
    let result = py.detach(|| match kind {
        None => pipelines::color_auto(g, &opts),
        Some(kind) => pipelines::color_with(kind, g, &opts),
    });
    let out = result.map_err(|e| match e {
        PipelineError::Precondition { .. } => value_error(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    })?;
    let report = ColoringReport::new(g, &out, seed, timings.then(|| start.elapsed()));
    Ok(report.to_json())
}

fn to_coloring(classes: Vec<(u32, Vec<usize>)>) -> PackingColoring {
    PackingColoring {
        classes: classes
            .into_iter()
            .map(|(parameter, vertices)| ColorClass {
                parameter,
                vertices,
            })
            .collect(),
        uncolored: Vec::new(),
    }
}

fn violation_dict<'py>(py: Python<'py>, v: &Violation) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match *v {
        Violation::TooClose {
            class_index,
            parameter,
            u,
            v,
            distance,
        } => {
            d.set_item("kind", "too_close")?;
            d.set_item("class_index", class_index)?;
            d.set_item("parameter", parameter)?;
            d.set_item("u", u)?;
            d.set_item("v", v)?;
            d.set_item("distance", distance)?;
        }
        Violation::Uncolored { vertex } => {
            d.set_item("kind", "uncolored")?;
            d.set_item("vertex", vertex)?;
        }
        Violation::Repeated { vertex } => {
            d.set_item("kind", "repeated")?;
            d.set_item("vertex", vertex)?;
        }
        Violation::OutOfRange { vertex } => {
            d.set_item("kind", "out_of_range")?;
            d.set_item("vertex", vertex)?;
        }
    }
    Ok(d)
}

/// Checks `classes`, a list of `(parameter, vertices)` pairs, against
/// `sequence`. Returns the violations found; an empty list means valid.
/// Raises `ValueError` if the classes do not fit the sequence.
#[pyfunction]
fn verify<'py>(
    py: Python<'py>,
    graph: &Graph,
    sequence: &str,
    classes: Vec<(u32, Vec<usize>)>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let seq: PackingSequence = sequence.parse().map_err(value_error)?;
    let violations = packpaint_core::verify::verify(&graph.inner, &seq, &to_coloring(classes))
        .map_err(value_error)?;
    violations.iter().map(|v| violation_dict(py, v)).collect()
}

/// Exhaustive search. Returns `(verdict, classes, nodes_explored)` where
/// verdict is `feasible`, `infeasible` or `timeout` and classes is `None`
/// unless feasible.
#[pyfunction]
#[pyo3(signature = (graph, sequence, node_budget=10_000_000, time_budget=60.0))]
#[allow(clippy::type_complexity)]
fn decide(
    py: Python<'_>,
    graph: &Graph,
    sequence: &str,
    node_budget: u64,
    time_budget: f64,
) -> PyResult<(&'static str, Option<Vec<(u32, Vec<usize>)>>, u64)> {
    let seq: PackingSequence = sequence.parse().map_err(value_error)?;
    if !(time_budget.is_finite() && time_budget >= 0.0) {
        return Err(value_error(format!("invalid time budget {time_budget}")));
    }
    let budget = SearchBudget {
        max_nodes: node_budget,
        max_time: Duration::from_secs_f64(time_budget),
    };
    let g = &graph.inner;
    let result = py.detach(|| exact::decide(g, &seq, budget));
    Ok(match result.verdict {
        Verdict::Feasible(col) => (
            "feasible",
            Some(
                col.classes
                    .into_iter()
                    .map(|c| (c.parameter, c.vertices))
                    .collect(),
            ),
            result.nodes_explored,
        ),
        Verdict::Infeasible => ("infeasible", None, result.nodes_explored),
        Verdict::Timeout => ("timeout", None, result.nodes_explored),
    })
}

#[pymodule]
fn packpaint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(parse_edge_list, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(color, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    Ok(())
}
