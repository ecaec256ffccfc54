//! Constructive packing colorings for bounded-degree graphs.
//!
//! Each pipeline works per connected component with the global maximum
//! degree `k`. Structural facts that would follow from exact optimality of
//! the independent layers are checked at runtime; when one fails the
//! component is retried on the next rung of the escalation ladder
//! (local search, exact layers, exact solver). Every coloring is verified
//! before it is returned.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::brooks::{self, BrooksError};
use crate::exact::{self, SearchBudget, Verdict};
use crate::graph::Graph;
use crate::mis::{self, ExchangePolicy, LayeredFamily, WeightProfile};
use crate::packing::{ColorClass, PackingColoring, PackingSequence};
use crate::verify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Deg2,
    ZeroSaturated,
    MidSaturated,
    HighSaturated,
    General,
}

impl PipelineKind {
    pub fn name(self) -> &'static str {
        match self {
            PipelineKind::Deg2 => "deg2",
            PipelineKind::ZeroSaturated => "zero",
            PipelineKind::MidSaturated => "mid",
            PipelineKind::HighSaturated => "high",
            PipelineKind::General => "general",
        }
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EscalationLevel {
    #[default]
    LocalSearch,
    ExactLayers,
    ExactSolver,
}

/// Classification of a maximal path of the residual graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathClass {
    /// One edge, both ends of degree `k - 1`.
    P1,
    /// One edge, ends of degree `k` and `k - 1`.
    P2,
    /// One edge, both ends of degree `k`.
    P3,
    /// Two edges, ends of degree `k - 1`, middle of degree `k`.
    P4,
    /// A path of the given length (edge count).
    Length(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualPath {
    pub vertices: Vec<usize>,
    pub class: PathClass,
}

/// A layer vertex moved to another 1-class so that `child` could take its
/// old class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RecolorStep {
    pub child: usize,
    pub father: usize,
    pub old_class: usize,
    pub new_class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineTrace {
    pub pipeline: PipelineKind,
    pub layers: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
    pub paths: Vec<ResidualPath>,
    pub e: Vec<usize>,
    pub e_prime: Vec<usize>,
    pub c: Vec<usize>,
    pub recolor_log: Vec<RecolorStep>,
    /// Highest rung any component needed.
    pub escalation: EscalationLevel,
    /// Failed checks that caused escalation.
    pub notes: Vec<String>,
}

impl PipelineTrace {
    fn new(pipeline: PipelineKind) -> Self {
        PipelineTrace {
            pipeline,
            layers: Vec::new(),
            residual: Vec::new(),
            paths: Vec::new(),
            e: Vec::new(),
            e_prime: Vec::new(),
            c: Vec::new(),
            recolor_log: Vec::new(),
            escalation: EscalationLevel::LocalSearch,
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    /// Parameters of the classes actually used.
    pub sequence: PackingSequence,
    /// The pipeline's guaranteed budget; `sequence` fits within it.
    pub budget: PackingSequence,
    pub coloring: PackingColoring,
    pub trace: PipelineTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("{pipeline} pipeline does not apply: {reason}")]
    Precondition {
        pipeline: PipelineKind,
        reason: String,
    },
    #[error("{pipeline} pipeline failed at {level:?}: {assertion} (witness {witness:?})")]
    Failed {
        pipeline: PipelineKind,
        level: EscalationLevel,
        assertion: String,
        witness: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub seed: u64,
    pub policy: ExchangePolicy,
    pub exact_budget: SearchBudget,
    /// Highest rung the ladder may climb to.
    pub max_level: EscalationLevel,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            seed: 0,
            policy: ExchangePolicy::default(),
            exact_budget: SearchBudget::default(),
            max_level: EscalationLevel::ExactSolver,
        }
    }
}

impl PipelineOptions {
    pub fn with_seed(seed: u64) -> Self {
        PipelineOptions {
            seed,
            policy: ExchangePolicy::with_seed(seed),
            ..Self::default()
        }
    }
}

/// Which pipeline `color_auto` uses for a graph.
pub fn select_pipeline(g: &Graph) -> PipelineKind {
    let profile = g.degree_profile();
    let (k, t) = (profile.k, profile.saturation);
    if k <= 2 {
        PipelineKind::Deg2
    } else if t == 0 {
        PipelineKind::ZeroSaturated
    } else if t <= k - 2 {
        PipelineKind::MidSaturated
    } else if t == k - 1 && k >= 4 {
        PipelineKind::HighSaturated
    } else {
        PipelineKind::General
    }
}

/// The sequence a pipeline guarantees for maximum degree `k`.
pub fn budget_for(kind: PipelineKind, k: usize) -> PackingSequence {
    let ones = k.saturating_sub(1);
    match kind {
        PipelineKind::Deg2 => PackingSequence::ones_twos_threes(2, 1, 0),
        PipelineKind::ZeroSaturated => PackingSequence::ones_twos_threes(ones, 0, 1),
        PipelineKind::MidSaturated => PackingSequence::ones_twos_threes(ones, 1, 0),
        PipelineKind::HighSaturated => PackingSequence::ones_twos_threes(ones, ones, 0),
        PipelineKind::General => PackingSequence::ones_twos_threes(ones, k, 0),
    }
}

pub fn color_auto(g: &Graph, opts: &PipelineOptions) -> Result<PipelineOutput, PipelineError> {
    color_with(select_pipeline(g), g, opts)
}

pub fn color_with(
    kind: PipelineKind,
    g: &Graph,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    match kind {
        PipelineKind::Deg2 => color_deg2(g),
        PipelineKind::ZeroSaturated => color_zero_saturated(g, opts),
        PipelineKind::MidSaturated => color_mid_saturated(g, opts),
        PipelineKind::HighSaturated => color_high_saturated(g, opts),
        PipelineKind::General => color_general(g, opts),
    }
}

/// Paths and even cycles get two 1-classes; each odd cycle alternates two
/// 1-classes and puts its last vertex in a shared 2-class.
pub fn color_deg2(g: &Graph) -> Result<PipelineOutput, PipelineError> {
    let kind = PipelineKind::Deg2;
    if g.max_degree() > 2 {
        return Err(PipelineError::Precondition {
            pipeline: kind,
            reason: format!("maximum degree {} exceeds 2", g.max_degree()),
        });
    }
    let mut slots = vec![(1u32, 0usize); g.n()];
    let mut odd = false;
    for component in g.components() {
        let walk = walk_component(g, &component);
        let is_odd_cycle = component.len() >= 3
            && component.iter().all(|&v| g.degree(v) == 2)
            && component.len() % 2 == 1;
        for (i, &v) in walk.iter().enumerate() {
            slots[v] = (1, i % 2);
        }
        if is_odd_cycle {
            slots[*walk.last().unwrap()] = (2, 0);
            odd = true;
        }
    }
    let budget = if odd {
        PackingSequence::ones_twos_threes(2, 1, 0)
    } else {
        PackingSequence::ones_twos_threes(2, 0, 0)
    };
    finish(g, kind, budget, &slots, PipelineTrace::new(kind))
}

/// Vertices of a path or cycle component in walking order, starting from
/// an end of the path (or the smallest vertex of a cycle).
fn walk_component(g: &Graph, component: &[usize]) -> Vec<usize> {
    let start = component
        .iter()
        .copied()
        .find(|&v| g.degree(v) < 2)
        .unwrap_or(component[0]);
    let mut walk = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .filter(|&u| u != prev)
            .min();
        match next {
            Some(u) if u != start => {
                walk.push(u);
                prev = cur;
                cur = u;
            }
            _ => break,
        }
    }
    walk
}

pub fn color_zero_saturated(
    g: &Graph,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let profile = g.degree_profile();
    check(
        PipelineKind::ZeroSaturated,
        profile.k >= 3 && profile.saturation == 0,
        || {
            format!(
                "needs k >= 3 and saturation 0, got k = {} and saturation {}",
                profile.k, profile.saturation
            )
        },
    )?;
    run(PipelineKind::ZeroSaturated, g, profile.k, opts)
}

pub fn color_mid_saturated(
    g: &Graph,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let profile = g.degree_profile();
    let (k, t) = (profile.k, profile.saturation);
    check(
        PipelineKind::MidSaturated,
        k >= 3 && t >= 1 && t + 2 <= k,
        || format!("needs k >= 3 and 1 <= saturation <= k - 2, got k = {k} and saturation {t}"),
    )?;
    run(PipelineKind::MidSaturated, g, k, opts)
}

pub fn color_high_saturated(
    g: &Graph,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let profile = g.degree_profile();
    let (k, t) = (profile.k, profile.saturation);
    check(PipelineKind::HighSaturated, k >= 4 && t + 1 == k, || {
        format!("needs k >= 4 and saturation k - 1, got k = {k} and saturation {t}")
    })?;
    run(PipelineKind::HighSaturated, g, k, opts)
}

pub fn color_general(g: &Graph, opts: &PipelineOptions) -> Result<PipelineOutput, PipelineError> {
    let k = g.max_degree();
    check(PipelineKind::General, k >= 3, || {
        format!("needs k >= 3, got {k}")
    })?;
    run(PipelineKind::General, g, k, opts)
}

fn check(
    kind: PipelineKind,
    ok: bool,
    reason: impl FnOnce() -> String,
) -> Result<(), PipelineError> {
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Precondition {
            pipeline: kind,
            reason: reason(),
        })
    }
}

/// (distance parameter, index among classes with that parameter).
type Slot = (u32, usize);

/// A failed structural check, with vertices in component-local numbering.
#[derive(Debug)]
struct Assertion {
    message: String,
    witness: Vec<usize>,
}

impl Assertion {
    fn new(message: impl Into<String>, witness: Vec<usize>) -> Self {
        Assertion {
            message: message.into(),
            witness,
        }
    }
}

impl From<mis::MisError> for Assertion {
    fn from(e: mis::MisError) -> Self {
        let witness = match &e {
            mis::MisError::NotIndependent(u, v) => vec![*u, *v],
            mis::MisError::MissingFather { vertex, .. } => vec![*vertex],
            _ => vec![],
        };
        Assertion::new(e.to_string(), witness)
    }
}

impl From<BrooksError> for Assertion {
    fn from(e: BrooksError) -> Self {
        let witness = match &e {
            BrooksError::Exception { component, .. } => component.clone(),
            BrooksError::BudgetBelowDegree { .. } => vec![],
        };
        Assertion::new(format!("brooks step: {e}"), witness)
    }
}

/// Component-local construction result.
#[derive(Default)]
struct Local {
    slots: Vec<Slot>,
    layers: Vec<Vec<usize>>,
    residual: Vec<usize>,
    paths: Vec<ResidualPath>,
    e: Vec<usize>,
    e_prime: Vec<usize>,
    c: Vec<usize>,
    recolor_log: Vec<RecolorStep>,
}

fn run(
    kind: PipelineKind,
    g: &Graph,
    k: usize,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let budget = budget_for(kind, k);
    let mut trace = PipelineTrace::new(kind);
    let mut slots: Vec<Slot> = vec![(1, 0); g.n()];
    for component in g.components() {
        let sub = g.induced_subgraph(&component);
        let h = &sub.graph;
        let lift = |vs: &[usize]| -> Vec<usize> { vs.iter().map(|&v| sub.to_parent[v]).collect() };
        let mut last: Option<(EscalationLevel, Assertion)> = None;
        let mut done = None;
        for level in [
            EscalationLevel::LocalSearch,
            EscalationLevel::ExactLayers,
            EscalationLevel::ExactSolver,
        ] {
            if level > opts.max_level {
                break;
            }
            let attempt = match level {
                EscalationLevel::ExactSolver => exact_rung(h, &budget, opts),
                _ => construct(kind, h, k, level == EscalationLevel::ExactLayers, opts),
            };
            let attempt = attempt.and_then(|local| {
                let col = coloring_from_slots(&local.slots);
                match verify::verify(h, &budget, &col) {
                    Ok(v) if v.is_empty() => Ok(local),
                    Ok(v) => Err(Assertion::new(
                        format!("verifier found {} violations", v.len()),
                        vec![],
                    )),
                    Err(e) => Err(Assertion::new(e.to_string(), vec![])),
                }
            });
            match attempt {
                Ok(local) => {
                    done = Some((level, local));
                    break;
                }
                Err(a) => {
                    trace.notes.push(format!(
                        "{level:?}: {} (witness {:?})",
                        a.message,
                        lift(&a.witness)
                    ));
                    last = Some((level, a));
                }
            }
        }
        let Some((level, local)) = done else {
            let (level, a) = last.expect("at least one rung runs");
            return Err(PipelineError::Failed {
                pipeline: kind,
                level,
                assertion: a.message,
                witness: lift(&a.witness),
            });
        };
        trace.escalation = trace.escalation.max(level);
        for (v, &slot) in local.slots.iter().enumerate() {
            slots[sub.to_parent[v]] = slot;
        }
        if trace.layers.len() < local.layers.len() {
            trace.layers.resize(local.layers.len(), Vec::new());
        }
        for (i, layer) in local.layers.iter().enumerate() {
            trace.layers[i].extend(lift(layer));
        }
        trace.residual.extend(lift(&local.residual));
        trace.e.extend(lift(&local.e));
        trace.e_prime.extend(lift(&local.e_prime));
        trace.c.extend(lift(&local.c));
        for p in &local.paths {
            trace.paths.push(ResidualPath {
                vertices: lift(&p.vertices),
                class: p.class,
            });
        }
        for step in &local.recolor_log {
            trace.recolor_log.push(RecolorStep {
                child: sub.to_parent[step.child],
                father: sub.to_parent[step.father],
                ..*step
            });
        }
    }
    for layer in &mut trace.layers {
        layer.sort_unstable();
    }
    for set in [
        &mut trace.residual,
        &mut trace.e,
        &mut trace.e_prime,
        &mut trace.c,
    ] {
        set.sort_unstable();
    }
    finish(g, kind, budget, &slots, trace)
}

fn finish(
    g: &Graph,
    kind: PipelineKind,
    budget: PackingSequence,
    slots: &[Slot],
    trace: PipelineTrace,
) -> Result<PipelineOutput, PipelineError> {
    let coloring = coloring_from_slots(slots);
    let violations = verify::verify(g, &budget, &coloring);
    match violations {
        Ok(v) if v.is_empty() => {}
        other => {
            return Err(PipelineError::Failed {
                pipeline: kind,
                level: trace.escalation,
                assertion: format!("final verification failed: {other:?}"),
                witness: vec![],
            })
        }
    }
    Ok(PipelineOutput {
        sequence: coloring.sequence(),
        budget,
        coloring,
        trace,
    })
}

/// Classes ordered by slot, empty slots dropped.
fn coloring_from_slots(slots: &[Slot]) -> PackingColoring {
    let mut groups: BTreeMap<Slot, Vec<usize>> = BTreeMap::new();
    for (v, &slot) in slots.iter().enumerate() {
        groups.entry(slot).or_default().push(v);
    }
    PackingColoring {
        classes: groups
            .into_iter()
            .map(|((parameter, _), vertices)| ColorClass {
                parameter,
                vertices,
            })
            .collect(),
        uncolored: Vec::new(),
    }
}

fn exact_rung(
    h: &Graph,
    budget: &PackingSequence,
    opts: &PipelineOptions,
) -> Result<Local, Assertion> {
    let result = exact::decide(h, budget, opts.exact_budget);
    match result.verdict {
        Verdict::Feasible(col) => {
            let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
            let mut slots = vec![(1, 0); h.n()];
            for class in &col.classes {
                let idx = seen.entry(class.parameter).or_insert(0);
                for &v in &class.vertices {
                    slots[v] = (class.parameter, *idx);
                }
                *idx += 1;
            }
            Ok(Local {
                slots,
                ..Local::default()
            })
        }
        Verdict::Infeasible => Err(Assertion::new(
            format!("exact search proved {budget} infeasible"),
            vec![],
        )),
        Verdict::Timeout => Err(Assertion::new(
            format!(
                "exact search for {budget} ran out of budget after {} nodes",
                result.nodes_explored
            ),
            vec![],
        )),
    }
}

fn construct(
    kind: PipelineKind,
    h: &Graph,
    k: usize,
    exact: bool,
    opts: &PipelineOptions,
) -> Result<Local, Assertion> {
    match kind {
        PipelineKind::ZeroSaturated => zero(h, k, exact, opts),
        PipelineKind::MidSaturated => mid(h, k, exact, opts),
        PipelineKind::HighSaturated => high(h, k, exact, opts),
        PipelineKind::General => general(h, k, exact, opts),
        PipelineKind::Deg2 => unreachable!("deg2 colors directly"),
    }
}

fn layers(
    h: &Graph,
    m: usize,
    w: WeightProfile,
    exact: bool,
    opts: &PipelineOptions,
) -> Result<LayeredFamily, Assertion> {
    if exact && h.n() > mis::EXACT_CAP {
        return Err(Assertion::new(
            format!(
                "exact layers need at most {} vertices, component has {}",
                mis::EXACT_CAP,
                h.n()
            ),
            vec![],
        ));
    }
    Ok(mis::build_layers(h, m, &w, &opts.policy, exact)?)
}

fn lift_coloring(
    slots: &mut [Slot],
    sub_to_parent: &[usize],
    col: &brooks::ProperColoring,
    parameter: u32,
    offset: usize,
) {
    for (i, &c) in col.assignment.iter().enumerate() {
        slots[sub_to_parent[i]] = (parameter, offset + c);
    }
}

fn first_within(h: &Graph, set: &[usize], radius: usize) -> Option<(usize, usize)> {
    let mut mask = vec![false; h.n()];
    for &v in set {
        mask[v] = true;
    }
    for &u in set {
        let dist = h.bfs_bounded(u, radius);
        if let Some(v) = set.iter().copied().find(|&v| v != u && dist[v].is_some()) {
            return Some((u.min(v), u.max(v)));
        }
    }
    None
}

/// One φ-optimal layer as `1_{k-1}`, the residual minus one low-degree
/// vertex per `K_{k-1}` in `1_1..1_{k-2}`, and those vertices in the 3-class.
fn zero(h: &Graph, k: usize, exact: bool, opts: &PipelineOptions) -> Result<Local, Assertion> {
    let fam = layers(h, 1, WeightProfile::sparse(k), exact, opts)?;
    let residual = fam.residual.clone();
    let rsub = h.induced_subgraph(&residual);
    if let Some(v) = rsub
        .graph
        .vertices()
        .find(|&v| rsub.graph.degree(v) > k - 2)
    {
        return Err(Assertion::new(
            format!("residual degree exceeds {}", k - 2),
            vec![rsub.to_parent[v]],
        ));
    }
    let mut c = Vec::new();
    let mut in_clique = vec![false; h.n()];
    for clique in rsub.graph.cliques_of_size(k - 1) {
        let clique = rsub.lift(clique);
        if let Some(&v) = clique.iter().find(|&&v| in_clique[v]) {
            return Err(Assertion::new(
                "residual cliques of order k - 1 overlap",
                vec![v],
            ));
        }
        for &v in &clique {
            in_clique[v] = true;
        }
        match clique.iter().copied().find(|&v| h.degree(v) < k) {
            Some(v) => c.push(v),
            None => {
                return Err(Assertion::new(
                    "residual clique has no vertex of degree below k",
                    clique,
                ))
            }
        }
    }
    c.sort_unstable();
    if let Some((u, v)) = first_within(h, &c, 3) {
        return Err(Assertion::new(
            "two 3-class vertices within distance 3",
            vec![u, v],
        ));
    }
    let mut slots = vec![(1, k - 2); h.n()];
    let rest: Vec<usize> = residual
        .iter()
        .copied()
        .filter(|v| c.binary_search(v).is_err())
        .collect();
    let rest_sub = h.induced_subgraph(&rest);
    let col = brooks::brooks_color(&rest_sub.graph, k - 2)
        .map_err(|e| lift_brooks(e, &rest_sub.to_parent))?;
    lift_coloring(&mut slots, &rest_sub.to_parent, &col, 1, 0);
    for &v in &c {
        slots[v] = (3, 0);
    }
    Ok(Local {
        slots,
        layers: fam.layers.clone(),
        residual,
        c,
        ..Local::default()
    })
}

fn lift_brooks(e: BrooksError, to_parent: &[usize]) -> Assertion {
    let mut a = Assertion::from(e);
    a.witness = a.witness.iter().map(|&v| to_parent[v]).collect();
    a
}

/// Residual maximal paths in parent numbering, plus isolated residual vertices.
fn residual_paths(
    h: &Graph,
    residual: &[usize],
) -> Result<(Vec<Vec<usize>>, Vec<usize>), Assertion> {
    let rsub = h.induced_subgraph(residual);
    let decomposition = rsub.graph.maximal_paths().map_err(|e| {
        let witness = match e {
            crate::graph::GraphError::Cycle(v) | crate::graph::GraphError::DegreeAboveTwo(v) => {
                vec![rsub.to_parent[v]]
            }
            _ => vec![],
        };
        Assertion::new(format!("residual is not a union of paths: {e}"), witness)
    })?;
    let paths = decomposition
        .paths
        .iter()
        .map(|p| rsub.lift(p.iter().copied()))
        .collect();
    Ok((paths, rsub.lift(decomposition.isolated.iter().copied())))
}

fn check_independent(h: &Graph, set: &[usize], what: &str) -> Result<(), Assertion> {
    match h.edge_within(set) {
        Some((u, v)) => Err(Assertion::new(
            format!("{what} is not independent"),
            vec![u, v],
        )),
        None => Ok(()),
    }
}

/// `k - 2` φ-optimal layers, then one end of each short residual path in
/// `1_{k-1}` and the rest of the residual in the 2-class.
fn mid(h: &Graph, k: usize, exact: bool, opts: &PipelineOptions) -> Result<Local, Assertion> {
    let fam = layers(h, k - 2, WeightProfile::sparse(k), exact, opts)?;
    let (paths, isolated) = residual_paths(h, &fam.residual)?;
    let mut e = isolated;
    let mut records = Vec::new();
    for path in paths {
        let degs: Vec<usize> = path.iter().map(|&v| h.degree(v)).collect();
        let class = match degs.as_slice() {
            [a, b] if *a == k - 1 && *b == k - 1 => PathClass::P1,
            [a, b] if (*a == k && *b == k - 1) || (*a == k - 1 && *b == k) => PathClass::P2,
            [a, b] if *a == k && *b == k => PathClass::P3,
            [a, b, c] if *a == k - 1 && *b == k && *c == k - 1 => PathClass::P4,
            _ => {
                return Err(Assertion::new(
                    format!("residual path with degrees {degs:?} has no type"),
                    path,
                ))
            }
        };
        match class {
            PathClass::P1 | PathClass::P3 => e.push(path[0].min(path[1])),
            PathClass::P2 => e.push(if degs[0] == k { path[0] } else { path[1] }),
            _ => e.extend([path[0], path[2]]),
        }
        records.push(ResidualPath {
            vertices: path,
            class,
        });
    }
    e.sort_unstable();
    let e_prime: Vec<usize> = fam
        .residual
        .iter()
        .copied()
        .filter(|v| e.binary_search(v).is_err())
        .collect();
    check_independent(h, &e, "E")?;
    if let Some((u, v)) = first_within(h, &e_prime, 2) {
        return Err(Assertion::new(
            "two 2-class vertices within distance 2",
            vec![u, v],
        ));
    }
    let mut slots = vec![(1, 0); h.n()];
    for (i, layer) in fam.layers.iter().enumerate() {
        for &v in layer {
            slots[v] = (1, i);
        }
    }
    for &v in &e {
        slots[v] = (1, k - 2);
    }
    for &v in &e_prime {
        slots[v] = (2, 0);
    }
    Ok(Local {
        slots,
        layers: fam.layers.clone(),
        residual: fam.residual.clone(),
        paths: records,
        e,
        e_prime,
        ..Local::default()
    })
}

/// `k - 2` layers weighted 5:2, `E` in `1_{k-1}`, a recoloring sweep that
/// frees 1-classes for uncolored residual vertices, and the remainder
/// colored through the square graph with `k - 1` 2-classes.
fn high(h: &Graph, k: usize, exact: bool, opts: &PipelineOptions) -> Result<Local, Assertion> {
    let fam = layers(h, k - 2, WeightProfile::dense(k), exact, opts)?;
    let (paths, isolated) = residual_paths(h, &fam.residual)?;
    let mut e = isolated;
    let mut records = Vec::new();
    for path in paths {
        let len = path.len() - 1;
        if len > 3 {
            return Err(Assertion::new(
                format!("residual path of length {len}"),
                path,
            ));
        }
        if let Some(&v) = path[1..len].iter().find(|&&v| h.degree(v) != k) {
            return Err(Assertion::new(
                "interior residual path vertex below degree k",
                vec![v],
            ));
        }
        match len {
            1 => {
                let pick = path
                    .iter()
                    .copied()
                    .filter(|&v| h.degree(v) == k)
                    .min()
                    .unwrap_or_else(|| path[0].min(path[1]));
                e.push(pick);
            }
            2 => e.extend([path[0], path[2]]),
            _ => {
                let mut a = [path[0], path[2]];
                let mut b = [path[1], path[3]];
                a.sort_unstable();
                b.sort_unstable();
                e.extend(a.min(b));
            }
        }
        records.push(ResidualPath {
            vertices: path,
            class: PathClass::Length(len),
        });
    }
    e.sort_unstable();
    check_independent(h, &e, "E")?;

    let mut color: Vec<Option<usize>> = vec![None; h.n()];
    for (i, layer) in fam.layers.iter().enumerate() {
        for &v in layer {
            color[v] = Some(i);
        }
    }
    for &v in &e {
        color[v] = Some(k - 2);
    }
    let uncolored: Vec<usize> = fam
        .residual
        .iter()
        .copied()
        .filter(|v| e.binary_search(v).is_err())
        .collect();
    let recolor_log = recolor_sweep(h, k, &uncolored, &mut color);
    let e_prime: Vec<usize> = uncolored
        .into_iter()
        .filter(|&v| color[v].is_none())
        .collect();

    let square = h.power(2).induced_subgraph(&e_prime);
    if let Some(v) = square
        .graph
        .vertices()
        .find(|&v| square.graph.degree(v) > k - 1)
    {
        return Err(Assertion::new(
            format!("square of E' has degree above {}", k - 1),
            vec![square.to_parent[v]],
        ));
    }
    let col = brooks::brooks_color(&square.graph, k - 1)
        .map_err(|e| lift_brooks(e, &square.to_parent))?;
    let mut slots: Vec<Slot> = color.iter().map(|c| (1, c.unwrap_or(0))).collect();
    lift_coloring(&mut slots, &square.to_parent, &col, 2, 0);
    Ok(Local {
        slots,
        layers: fam.layers.clone(),
        residual: fam.residual.clone(),
        paths: records,
        e,
        e_prime,
        recolor_log,
        ..Local::default()
    })
}

/// For each uncolored `x` in ascending order: if for some layer class `i`
/// every neighbor currently in `1_i` has another free 1-class, move those
/// neighbors and give `x` the class `1_i`. Repeats until a pass changes
/// nothing.
fn recolor_sweep(
    h: &Graph,
    k: usize,
    uncolored: &[usize],
    color: &mut [Option<usize>],
) -> Vec<RecolorStep> {
    let classes = k - 1;
    let free_class = |color: &[Option<usize>], u: usize, avoid: usize| -> Option<usize> {
        let mut used = vec![false; classes];
        used[avoid] = true;
        for &w in h.neighbors(u) {
            if let Some(c) = color[w] {
                used[c] = true;
            }
        }
        used.iter().position(|&b| !b)
    };
    let mut log = Vec::new();
    loop {
        let mut changed = false;
        for &x in uncolored {
            if color[x].is_some() {
                continue;
            }
            for i in 0..k - 2 {
                let fathers: Vec<usize> = h
                    .neighbors(x)
                    .iter()
                    .copied()
                    .filter(|&u| color[u] == Some(i))
                    .collect();
                if !fathers.iter().all(|&u| free_class(color, u, i).is_some()) {
                    continue;
                }
                for &u in &fathers {
                    // Fathers share class i, so they are pairwise nonadjacent
                    // and one move cannot invalidate another's free class.
                    let j = free_class(color, u, i).unwrap();
                    color[u] = Some(j);
                    log.push(RecolorStep {
                        child: x,
                        father: u,
                        old_class: i,
                        new_class: j,
                    });
                }
                color[x] = Some(i);
                changed = true;
                break;
            }
        }
        if !changed {
            return log;
        }
    }
}

/// `k - 1` nonempty layers maximizing their union (then minimizing edges to
/// the residual), and the residual colored through the square graph with
/// `k` 2-classes.
fn general(h: &Graph, k: usize, exact: bool, opts: &PipelineOptions) -> Result<Local, Assertion> {
    let m = k - 1;
    if h.n() < m {
        // Too small for m nonempty layers: every vertex its own 1-class.
        return Ok(Local {
            slots: (0..h.n()).map(|v| (1, v)).collect(),
            ..Local::default()
        });
    }
    let fam = mis::build_balanced_family(h, m, &opts.policy)?;
    if let Some(&v) = fam.residual.iter().find(|&&v| h.degree(v) + 1 < k) {
        return Err(Assertion::new(
            "residual vertex of degree below k - 1",
            vec![v],
        ));
    }
    let square = h.power(2).induced_subgraph(&fam.residual);
    let mut slots = vec![(1, 0); h.n()];
    for (i, layer) in fam.layers.iter().enumerate() {
        for &v in layer {
            slots[v] = (1, i);
        }
    }
    if exact {
        let seq = PackingSequence::from_counts([(1, k)]);
        let result = exact::decide(&square.graph, &seq, opts.exact_budget);
        let Verdict::Feasible(col) = result.verdict else {
            return Err(Assertion::new(
                format!("square of the residual is not {k}-colorable within budget"),
                fam.residual.clone(),
            ));
        };
        for (j, class) in col.classes.iter().enumerate() {
            for &v in &class.vertices {
                slots[square.to_parent[v]] = (2, j);
            }
        }
    } else {
        if let Some(v) = square
            .graph
            .vertices()
            .find(|&v| square.graph.degree(v) > k)
        {
            return Err(Assertion::new(
                format!("square of the residual has degree above {k}"),
                vec![square.to_parent[v]],
            ));
        }
        let col = brooks::brooks_color(&square.graph, k)
            .map_err(|e| lift_brooks(e, &square.to_parent))?;
        lift_coloring(&mut slots, &square.to_parent, &col, 2, 0);
    }
    Ok(Local {
        slots,
        layers: fam.layers.clone(),
        residual: fam.residual.clone(),
        e_prime: fam.residual.clone(),
        ..Local::default()
    })
}
