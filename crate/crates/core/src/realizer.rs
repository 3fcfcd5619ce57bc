//! The realization engine: from a pattern satisfying the component hypothesis
//! to a certified algebraically positive matrix in its qualitative class.
//!
//! Pipeline: minimal subpattern → split + diagonals into coupled pairs →
//! zero-diagonal construction (component cycle, component expansion, ear
//! attachment) → contract the pairs → lift to the original pattern.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::constructions::{
    attach_cycle_negative, attach_cycle_positive, contract_pair, expand_component, split_leading_diagonal,
    ConstructionError, EigenTriple, Variant24, Variant25,
};
use crate::pattern::{positive_part, sign_of, Permutation, RealMatrix, Sign, SignPattern};
use crate::spectral::{perturb_with_epsilon, realize_base_cycle, verify_algebraic_positivity, SpectralError};
use crate::structure::{
    candidate_ears, color_arcs, cycle_order_ending_at, cycles_through, digraph_of, extend_nested_sequence,
    irreducible_components, is_ap_irreducible, is_directed_cycle, is_minimally_ap_irreducible, is_strongly_connected,
    minimal_ap_subpattern, nested_sequence, quotient_digraph, Digraph, Ear, NestedSequence, StructureError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("engine invariant broken: {0}")]
    EngineInvariantBroken(String),
    #[error("negative diagonal entry at index {0}")]
    NegativeDiagonal(usize),
    /// The matrix was built but its witness cannot be confirmed in floating point.
    #[error("numerical limit: {0}")]
    Numerical(SpectralError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

fn broken(ctx: &str, e: impl fmt::Display) -> RealizeError {
    RealizeError::EngineInvariantBroken(format!("{ctx}: {e}"))
}

/// Which operation produced a trace step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Positive diagonal entries replaced by coupled index pairs.
    VertexSplit,
    /// 2I − C on the cycle of component placeholders.
    BaseCycle,
    /// New placeholder path through a negative entry.
    AttachNegative,
    /// New placeholder path through a positive entry.
    AttachPositive,
    /// Placeholder replaced by a cycle.
    SplitCycle,
    /// Placeholder replaced by a cycle with a chord.
    SplitChord,
    /// Placeholder replaced by a cycle whose closing arc is split.
    SplitEntry,
    /// Entry replaced by a path.
    PathPlain,
    /// Entry replaced by a path with a chord.
    PathChord,
    /// Entry replaced by a path whose last arc is split.
    PathSplitTerminal,
    /// A zero entry made nonzero by a small perturbation.
    AddEntry,
    /// A coupled pair merged back into one index.
    Contract,
    /// Final perturbation up to the requested pattern.
    Lift,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub labels: Vec<String>,
    pub pattern: SignPattern,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl TraceStep {
    /// The pattern re-indexed to the given label order, if the label sets agree.
    pub fn pattern_in_order(&self, order: &[&str]) -> Option<SignPattern> {
        if order.len() != self.labels.len() {
            return None;
        }
        let pos: Option<Vec<usize>> = order.iter().map(|l| self.labels.iter().position(|x| x == l)).collect();
        let pos = pos?;
        let mut out = SignPattern::zeros(order.len());
        for (a, &i) in pos.iter().enumerate() {
            for (b, &j) in pos.iter().enumerate() {
                out.set(a, b, self.pattern.get(i, j));
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct ConstructionTrace {
    pub steps: Vec<TraceStep>,
}

impl ConstructionTrace {
    pub fn stage(&self, name: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.stage.as_deref() == Some(name))
    }

    pub fn stages(&self) -> Vec<&str> {
        self.steps.iter().filter_map(|s| s.stage.as_deref()).collect()
    }
}

/// Certified output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    pub pattern: SignPattern,
    pub matrix: RealMatrix,
    pub lambda: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub witness: crate::spectral::WitnessPolynomial,
    pub trace: ConstructionTrace,
}

/// First failed condition of the hypothesis, if any.
pub fn hypothesis_failure(a: &SignPattern) -> Option<String> {
    let n = a.order();
    if !is_strongly_connected(&digraph_of(a)) {
        return Some("the pattern is reducible (its digraph is not strongly connected)".into());
    }
    if let Some(i) = (0..n).find(|&i| (0..n).all(|j| a.get(i, j) != Sign::Plus)) {
        return Some(format!(
            "row {} has no + entry (every row and column must contain a +)",
            i + 1
        ));
    }
    if let Some(j) = (0..n).find(|&j| (0..n).all(|i| a.get(i, j) != Sign::Plus)) {
        return Some(format!(
            "column {} has no + entry (every row and column must contain a +)",
            j + 1
        ));
    }
    if !is_ap_irreducible(a) {
        return Some("A+ - (A-)^T is reducible".into());
    }
    if let Some((i, j)) = crate::structure::cross_component_plus(a) {
        return Some(format!(
            "+ entry at ({}, {}) joins two different irreducible components of the positive part",
            i + 1,
            j + 1
        ));
    }
    None
}

/// AP-irreducible with no + between distinct components of A₊.
pub fn hypothesis_holds(a: &SignPattern) -> bool {
    hypothesis_failure(a).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitPair {
    /// Index in the unsplit pattern.
    pub original: usize,
    /// Index i′ (receives the incoming arcs).
    pub first: usize,
    /// Index i″ (carries the outgoing arcs).
    pub second: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitMap {
    pub pairs: Vec<SplitPair>,
    /// Split index → original index.
    pub origin: Vec<usize>,
}

impl SplitMap {
    pub fn is_identity(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Display names: `i` for untouched indices, `i'` and `i''` for pairs (1-based).
    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = self.origin.iter().map(|o| (o + 1).to_string()).collect();
        for p in &self.pairs {
            out[p.first] = format!("{}'", p.original + 1);
            out[p.second] = format!("{}''", p.original + 1);
        }
        out
    }
}

/// Replace every + diagonal index by a pair coupled with + in both directions:
/// the first copy takes the incoming arcs, the second the outgoing ones.
pub fn split_positive_diagonals(x: &SignPattern) -> Result<(SignPattern, SplitMap), RealizeError> {
    let n = x.order();
    if let Some(i) = (0..n).find(|&i| x.get(i, i) == Sign::Minus) {
        return Err(RealizeError::NegativeDiagonal(i));
    }
    let mut origin = Vec::new();
    let mut pairs = Vec::new();
    let mut into = vec![0; n];
    let mut out_of = vec![0; n];
    for i in 0..n {
        into[i] = origin.len();
        origin.push(i);
        if x.get(i, i) == Sign::Plus {
            out_of[i] = origin.len();
            pairs.push(SplitPair {
                original: i,
                first: into[i],
                second: out_of[i],
            });
            origin.push(i);
        } else {
            out_of[i] = into[i];
        }
    }
    let mut y = SignPattern::zeros(origin.len());
    for (a, b) in x.nonzeros() {
        if a != b {
            y.set(out_of[a], into[b], x.get(a, b));
        }
    }
    for p in &pairs {
        y.set(p.first, p.second, Sign::Plus);
        y.set(p.second, p.first, Sign::Plus);
    }
    Ok((y, SplitMap { pairs, origin }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Real(usize),
    Slot(usize),
}

/// How a non-cycle component is grown.
enum Plan {
    /// The entry vertex is on the initial cycle (or there is none).
    EntryOnCycle(NestedSequence),
    /// The entry vertex first appears in ear `h`; ears 1..=h form a chain.
    EntryOnEar(NestedSequence, usize),
}

struct Engine<'a> {
    y: &'a SignPattern,
    names: &'a [String],
    comp_vertices: Vec<Vec<usize>>,
    red: HashMap<(usize, usize), (usize, usize)>,
    labels: Vec<Node>,
    t: EigenTriple,
    steps: Vec<TraceStep>,
}

struct Context {
    layer: usize,
    /// 1-based position within the layer.
    local: usize,
    pred: Option<usize>,
    succ: Option<usize>,
}

impl<'a> Engine<'a> {
    fn name(&self, n: Node) -> String {
        match n {
            Node::Real(i) => self.names[i].clone(),
            Node::Slot(c) => format!("v{}", c + 1),
        }
    }

    fn index_of(&self, n: Node) -> Result<usize, RealizeError> {
        self.labels
            .iter()
            .position(|&x| x == n)
            .ok_or_else(|| broken("label lookup", format!("{} is not present", self.name(n))))
    }

    /// Reorder so `front` leads and `back` trails; the rest keep their order.
    fn arrange(&mut self, front: &[Node], back: &[Node]) -> Result<(), RealizeError> {
        let mut order = Vec::with_capacity(self.labels.len());
        for &f in front {
            order.push(self.index_of(f)?);
        }
        let mid: Vec<usize> = (0..self.labels.len())
            .filter(|&i| !front.contains(&self.labels[i]) && !back.contains(&self.labels[i]))
            .collect();
        order.extend(mid);
        for &b in back {
            order.push(self.index_of(b)?);
        }
        let sigma = Permutation::new(order).map_err(|e| broken("arrange", e))?;
        self.t = self.t.permute(&sigma);
        self.labels = sigma.images().iter().map(|&i| self.labels[i]).collect();
        Ok(())
    }

    fn record(&mut self, rule: Rule, stage: Option<String>, params: &[(&str, String)], eps: Option<f64>) {
        let step = TraceStep {
            rule,
            stage,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            epsilon: eps,
            labels: self.labels.iter().map(|&n| self.name(n)).collect(),
            pattern: sign_of(&self.t.matrix, 0.0),
            residual: Some(self.t.relative_residual()),
        };
        self.steps.push(step);
    }

    fn accept(&mut self, t: EigenTriple, ctx: &str) -> Result<(), RealizeError> {
        t.check().map_err(|e| broken(ctx, e))?;
        if !(t.lambda > 0.0) {
            return Err(broken(ctx, format!("eigenvalue {} is not positive", t.lambda)));
        }
        self.t = t;
        Ok(())
    }

    fn construction(&self, ctx: &str) -> impl Fn(ConstructionError) -> RealizeError + '_ {
        let ctx = ctx.to_string();
        move |e| broken(&ctx, e)
    }

    /// Make entry (i, j) nonzero with sign `s` by a small perturbation.
    fn add_entry(&mut self, i: Node, j: Node, s: Sign, stage: Option<String>) -> Result<(), RealizeError> {
        let (a, b) = (self.index_of(i)?, self.index_of(j)?);
        let target = sign_of(&self.t.matrix, 0.0).with_entry(a, b, s);
        let (t, eps) = perturb_with_epsilon(&self.t, &target).map_err(|e: SpectralError| broken("add entry", e))?;
        self.accept(t.normalized(), "add entry")?;
        let params = [("row", self.name(i)), ("col", self.name(j)), ("sign", s.to_string())];
        self.record(Rule::AddEntry, stage, &params, eps);
        Ok(())
    }

    /// Attach a new path of placeholders through entry (p0, q0).
    fn attach(&mut self, p0: usize, q0: usize, slots: &[usize], stage: String) -> Result<(), RealizeError> {
        self.arrange(&[Node::Real(p0)], &[])?;
        let j = self.index_of(Node::Real(q0))?;
        let entry = self.t.matrix.get(0, j);
        let k = slots.len();
        let (t, rule) = if entry > 0.0 {
            let t = attach_cycle_positive(&self.t, j, k).map_err(self.construction("attach positive"))?;
            (t, Rule::AttachPositive)
        } else {
            if entry == 0.0 {
                self.add_entry(Node::Real(p0), Node::Real(q0), Sign::Minus, None)?;
                self.arrange(&[Node::Real(p0)], &[])?;
            }
            let j = self.index_of(Node::Real(q0))?;
            let t = attach_cycle_negative(&self.t, j, k).map_err(self.construction("attach negative"))?;
            (t, Rule::AttachNegative)
        };
        self.accept(t, "attach")?;
        let mut labels: Vec<Node> = slots.iter().map(|&c| Node::Slot(c)).collect();
        labels.extend(&self.labels);
        self.labels = labels;
        let params = [
            ("row", self.names[p0].clone()),
            ("col", self.names[q0].clone()),
            ("k", k.to_string()),
        ];
        self.record(rule, Some(stage), &params, None);
        Ok(())
    }

    /// Replace the placeholder `slot` by `cycle` (its last vertex takes the slot's row).
    fn split(
        &mut self,
        slot: usize,
        cycle: &[usize],
        variant: Variant24,
        stage: Option<String>,
    ) -> Result<(), RealizeError> {
        self.arrange(&[Node::Slot(slot)], &[])?;
        let c = split_leading_diagonal(&self.t, cycle.len(), variant).map_err(self.construction("split"))?;
        self.accept(c.triple, "split")?;
        let mut labels: Vec<Node> = cycle.iter().map(|&v| Node::Real(v)).collect();
        labels.extend(&self.labels[1..]);
        self.labels = labels;
        let nm = |p: usize| self.names[cycle[p]].clone();
        let (rule, params) = match variant {
            Variant24::Cycle { j } => (Rule::SplitCycle, vec![("entry", nm(j))]),
            Variant24::Chord { j, s, .. } => (Rule::SplitChord, vec![("chord_from", nm(j)), ("chord_to", nm(s))]),
            Variant24::SplitEntry { s, .. } => (Rule::SplitEntry, vec![("chord_to", nm(s))]),
        };
        let mut params = params;
        params.push(("slot", format!("v{}", slot + 1)));
        self.record(rule, stage, &params, c.epsilon);
        Ok(())
    }

    /// Replace the positive entry (from, to) by `path`, moving the column
    /// entries of `moved` onto a path vertex.
    fn insert_path(
        &mut self,
        ear: &Ear,
        moved: &[Node],
        variant: Variant25,
        stage: Option<String>,
    ) -> Result<(), RealizeError> {
        self.arrange(&[Node::Real(ear.from)], moved)?;
        let j = self.index_of(Node::Real(ear.to))?;
        let k = self.labels.len() - moved.len();
        if j >= k {
            return Err(broken("insert path", "target column is among the moved rows"));
        }
        let c = expand_component(&self.t, ear.path.len(), j, k, variant).map_err(self.construction("insert path"))?;
        self.accept(c.triple, "insert path")?;
        let mut labels: Vec<Node> = ear.path.iter().map(|&v| Node::Real(v)).collect();
        labels.extend(&self.labels);
        self.labels = labels;
        let nm = |p: usize| self.names[ear.path[p]].clone();
        let mut params = vec![
            ("from", self.names[ear.from].clone()),
            ("to", self.names[ear.to].clone()),
        ];
        let rule = match variant {
            Variant25::Plain { s } => {
                if !moved.is_empty() {
                    params.push(("moved_to", nm(s)));
                }
                Rule::PathPlain
            }
            Variant25::Chord { s, t, .. } => {
                params.push(("chord_from", nm(s)));
                params.push(("chord_to", nm(t)));
                Rule::PathChord
            }
            Variant25::SplitTerminal { t, .. } => {
                params.push(("chord_to", nm(t)));
                Rule::PathSplitTerminal
            }
        };
        self.record(rule, stage, &params, c.epsilon);
        Ok(())
    }

    fn red_from(&self, a: usize, b: usize) -> Result<(usize, usize), RealizeError> {
        self.red
            .get(&(a, b))
            .copied()
            .ok_or_else(|| broken("red arcs", format!("no red arc from component {} to {}", a + 1, b + 1)))
    }

    /// Replace placeholder `c` by its component.
    fn expand(&mut self, c: usize, ctx: &Context) -> Result<(), RealizeError> {
        let alpha = self.comp_vertices[c].clone();
        let q_s = match ctx.pred {
            Some(p) => Some(self.red_from(p, c)?.1),
            None => None,
        };
        let p_s = match ctx.succ {
            Some(s) => self.red_from(c, s)?.0,
            None => alpha[0],
        };
        let pred_node = match ctx.pred {
            Some(p) => {
                let src = self.red_from(p, c)?.0;
                Some(if self.labels.contains(&Node::Real(src)) {
                    Node::Real(src)
                } else {
                    Node::Slot(p)
                })
            }
            None => None,
        };
        let done = format!("B[{},{}]", ctx.layer, ctx.local);
        let part = |t: usize| format!("B[{},{}],{}", ctx.layer, ctx.local - 1, t);
        let local = |v: usize| alpha.iter().position(|&x| x == v).unwrap();
        let sub = digraph_of(self.y).induced(&alpha);
        if alpha.len() < 2 {
            return Err(broken("expand", format!("component {} is a single vertex", c + 1)));
        }
        if is_directed_cycle(&sub) {
            let order: Vec<usize> = cycle_order_ending_at(&sub, local(p_s))
                .into_iter()
                .map(|i| alpha[i])
                .collect();
            let j = q_s.map_or(order.len() - 1, |q| order.iter().position(|&x| x == q).unwrap());
            return self.split(c, &order, Variant24::Cycle { j }, Some(done));
        }
        let plan = plan_component(&sub, local(p_s), q_s.map(local)).ok_or_else(|| {
            broken(
                "component plan",
                format!(
                    "no nested sequence of component {{{}}} fits the entry {:?} and exit {}",
                    alpha
                        .iter()
                        .map(|&v| self.names[v].clone())
                        .collect::<Vec<_>>()
                        .join(","),
                    q_s.map(|q| self.names[q].clone()),
                    self.names[p_s]
                ),
            )
        })?;
        let lift = |ns: NestedSequence| NestedSequence {
            cycle: ns.cycle.iter().map(|&i| alpha[i]).collect(),
            ears: ns
                .ears
                .iter()
                .map(|e| Ear {
                    from: alpha[e.from],
                    path: e.path.iter().map(|&i| alpha[i]).collect(),
                    to: alpha[e.to],
                })
                .collect(),
        };
        let (ns, h) = match plan {
            Plan::EntryOnCycle(ns) => (lift(ns), None),
            Plan::EntryOnEar(ns, h) => (lift(ns), Some(h)),
        };
        // cycle order with the exit vertex last
        let mut cyc: Vec<usize> = ns.cycle[1..].to_vec();
        cyc.push(ns.cycle[0]);
        let k = cyc.len();
        let pos = |v: usize, seq: &[usize]| seq.iter().position(|&x| x == v);
        let ears = &ns.ears;
        let e0 = &ears[0];
        let chord_variant = |from: usize, to: usize| {
            let j = pos(from, &cyc).unwrap();
            let s = pos(to, &cyc).unwrap();
            if j == k - 1 {
                Variant24::SplitEntry { s, eps: None }
            } else {
                Variant24::Chord { j, s, eps: None }
            }
        };
        let path_variant = |next: &Ear, path: &[usize]| match (pos(next.from, path), pos(next.to, path)) {
            (Some(s), Some(t)) if s + 1 == path.len() => Some(Variant25::SplitTerminal { t, eps: None }),
            (Some(s), Some(t)) => Some(Variant25::Chord { s, t, eps: None }),
            _ => None,
        };
        let mut start = 0;
        match h {
            None => {
                if let Some(q) = q_s.filter(|&q| q != e0.to) {
                    let j = pos(q, &cyc).unwrap();
                    self.split(c, &cyc, Variant24::Cycle { j }, None)?;
                    self.add_entry(Node::Real(e0.from), Node::Real(e0.to), Sign::Plus, Some(part(1)))?;
                } else {
                    self.split(c, &cyc, chord_variant(e0.from, e0.to), Some(part(1)))?;
                }
            }
            Some(h) => {
                let moved = [pred_node.ok_or_else(|| broken("expand", "entry without predecessor"))?];
                self.split(c, &cyc, chord_variant(e0.from, e0.to), Some(part(1)))?;
                for i in 0..h {
                    let v = path_variant(&ears[i + 1], &ears[i].path)
                        .ok_or_else(|| broken("expand", "chain ear does not contain the next chord"))?;
                    self.insert_path(&ears[i], &moved, v, Some(part(i + 2)))?;
                }
                let s = pos(q_s.unwrap(), &ears[h].path).unwrap();
                if h + 1 == ears.len() {
                    return self.insert_path(&ears[h], &moved, Variant25::Plain { s }, Some(part(h + 2)));
                }
                self.insert_path(&ears[h], &moved, Variant25::Plain { s }, None)?;
                let nx = &ears[h + 1];
                self.add_entry(Node::Real(nx.from), Node::Real(nx.to), Sign::Plus, Some(part(h + 2)))?;
                start = h + 1;
            }
        }
        for i in start..ears.len() {
            let stage = Some(part(i + 2));
            if i + 1 == ears.len() {
                self.insert_path(&ears[i], &[], Variant25::Plain { s: 0 }, stage)?;
            } else if let Some(v) = path_variant(&ears[i + 1], &ears[i].path) {
                self.insert_path(&ears[i], &[], v, stage)?;
            } else {
                self.insert_path(&ears[i], &[], Variant25::Plain { s: 0 }, None)?;
                let nx = &ears[i + 1];
                self.add_entry(Node::Real(nx.from), Node::Real(nx.to), Sign::Plus, stage)?;
            }
        }
        Ok(())
    }
}

const SEARCH_LIMIT: usize = 2000;

fn classify(ns: NestedSequence, q: Option<usize>) -> Option<Plan> {
    let Some(q) = q else {
        return Some(Plan::EntryOnCycle(ns));
    };
    if ns.cycle.contains(&q) {
        return Some(Plan::EntryOnCycle(ns));
    }
    let h = ns.ears.iter().position(|e| e.path.contains(&q))?;
    let chained = (0..h).all(|i| {
        let nx = &ns.ears[i + 1];
        ns.ears[i].path.contains(&nx.from) && ns.ears[i].path.contains(&nx.to)
    });
    chained.then_some(Plan::EntryOnEar(ns, h))
}

/// Choose a nested sequence of the component (local indices) whose first cycle
/// contains the exit `p` and whose shape lets the entry `q` be reached.
fn plan_component(sub: &Digraph, p: usize, q: Option<usize>) -> Option<Plan> {
    if let Some(plan) = nested_sequence(sub, p).ok().and_then(|ns| classify(ns, q)) {
        return Some(plan);
    }
    let cycles = cycles_through(sub, p, SEARCH_LIMIT);
    if let Some(q) = q {
        for c in cycles.iter().filter(|c| c.contains(&q)) {
            if let Ok(ns) = extend_nested_sequence(sub, c.clone(), Vec::new()) {
                return Some(Plan::EntryOnCycle(ns));
            }
        }
        for c in &cycles {
            let mut inside = vec![false; sub.vertex_count()];
            for &v in c {
                inside[v] = true;
            }
            if let Some(chain) = ear_chain(sub, &mut inside, c, q, 0) {
                let h = chain.len() - 1;
                if let Ok(ns) = extend_nested_sequence(sub, c.clone(), chain) {
                    return Some(Plan::EntryOnEar(ns, h));
                }
            }
        }
    }
    None
}

/// Ears each attached inside the previous one, ending with one that contains `q`.
fn ear_chain(sub: &Digraph, inside: &mut [bool], attach: &[usize], q: usize, depth: usize) -> Option<Vec<Ear>> {
    if depth > sub.vertex_count() {
        return None;
    }
    for e in candidate_ears(sub, inside, attach, SEARCH_LIMIT) {
        if e.path.contains(&q) {
            return Some(vec![e]);
        }
        for &v in &e.path {
            inside[v] = true;
        }
        let rest = ear_chain(sub, inside, &e.path, q, depth + 1);
        for &v in &e.path {
            inside[v] = false;
        }
        if let Some(mut rest) = rest {
            rest.insert(0, e);
            return Some(rest);
        }
    }
    None
}

fn check_case1_preconditions(y: &SignPattern) -> Result<(), RealizeError> {
    let n = y.order();
    if let Some(i) = (0..n).find(|&i| y.get(i, i) != Sign::Zero) {
        return Err(RealizeError::PreconditionViolated(format!(
            "diagonal entry {} is nonzero",
            i + 1
        )));
    }
    if !is_minimally_ap_irreducible(y) {
        return Err(RealizeError::PreconditionViolated(
            "pattern is not minimally AP-irreducible".into(),
        ));
    }
    if let Some((i, j)) = crate::structure::cross_component_plus(y) {
        return Err(RealizeError::PreconditionViolated(format!(
            "+ entry at ({}, {}) joins different components",
            i + 1,
            j + 1
        )));
    }
    Ok(())
}

/// Zero-diagonal construction with 1-based numeric labels.
pub fn realize_case1(y: &SignPattern) -> Result<(EigenTriple, ConstructionTrace), RealizeError> {
    let names: Vec<String> = (1..=y.order()).map(|i| i.to_string()).collect();
    realize_case1_named(y, &names)
}

/// Zero-diagonal construction; `names` label the indices in the trace.
/// The returned triple is in the index order of `y` with λ = 1.
pub fn realize_case1_named(
    y: &SignPattern,
    names: &[String],
) -> Result<(EigenTriple, ConstructionTrace), RealizeError> {
    check_case1_preconditions(y)?;
    let comps = irreducible_components(&positive_part(y));
    let coloring = color_arcs(y, &comps)?;
    let d0 = quotient_digraph(&coloring, &comps);
    let m = comps.len();
    // processing order of components: the initial cycle of D₀, then each ear's path
    let (first_layer, d0_ears): (Vec<usize>, Vec<Ear>) = if m == 1 {
        (vec![0], Vec::new())
    } else {
        let ns0 = nested_sequence(&d0, 0).map_err(|e| broken("quotient digraph", e))?;
        (ns0.cycle.clone(), ns0.ears.clone())
    };
    let mut order = first_layer.clone();
    for e in &d0_ears {
        order.extend(&e.path);
    }
    let mut proc_id = vec![0; m];
    for (k, &c) in order.iter().enumerate() {
        proc_id[c] = k;
    }
    let lab = comps.labels(y.order());
    let mut red = HashMap::new();
    for &(p, q) in &coloring.red {
        red.entry((proc_id[lab[p]], proc_id[lab[q]])).or_insert((p, q));
    }
    let comp_vertices: Vec<Vec<usize>> = order.iter().map(|&c| comps.parts[c].clone()).collect();

    let m1 = first_layer.len();
    let mut base = SignPattern::zeros(m1);
    for i in 0..m1 {
        base.set(i, i, Sign::Plus);
        if m1 > 1 {
            base.set(i, (i + 1) % m1, Sign::Minus);
        }
    }
    let t = realize_base_cycle(&base).map_err(|e| broken("base cycle", e))?;
    let mut eng = Engine {
        y,
        names,
        comp_vertices,
        red,
        labels: (0..m1).map(Node::Slot).collect(),
        t,
        steps: Vec::new(),
    };
    eng.record(Rule::BaseCycle, Some("B[1,0]".into()), &[("k", m1.to_string())], None);
    for s in 0..m1 {
        let ctx = Context {
            layer: 1,
            local: s + 1,
            pred: (m1 > 1).then(|| (s + m1 - 1) % m1),
            succ: (m1 > 1).then(|| (s + 1) % m1),
        };
        eng.expand(s, &ctx)?;
    }
    let mut next = m1;
    for (t, ear) in d0_ears.iter().enumerate() {
        let layer = t + 2;
        let slots: Vec<usize> = (next..next + ear.path.len()).collect();
        let a = proc_id[ear.from];
        let b = proc_id[ear.to];
        let p0 = eng.red_from(a, slots[0])?.0;
        let q0 = eng.red_from(*slots.last().unwrap(), b)?.1;
        eng.attach(p0, q0, &slots, format!("B[{layer},0]"))?;
        for (i, &c) in slots.iter().enumerate() {
            let ctx = Context {
                layer,
                local: i + 1,
                pred: Some(if i == 0 { a } else { slots[i - 1] }),
                succ: Some(if i + 1 == slots.len() { b } else { slots[i + 1] }),
            };
            eng.expand(c, &ctx)?;
        }
        next += ear.path.len();
    }
    // back to the index order of y
    let idx: Result<Vec<usize>, RealizeError> = (0..y.order()).map(|i| eng.index_of(Node::Real(i))).collect();
    let sigma = Permutation::new(idx?).map_err(|e| broken("final order", e))?;
    let t = eng.t.permute(&sigma);
    if sign_of(&t.matrix, 0.0) != *y {
        return Err(broken(
            "final pattern",
            "constructed matrix does not have the target signs",
        ));
    }
    Ok((t, ConstructionTrace { steps: eng.steps }))
}

/// Certified realization of a pattern satisfying the hypothesis.
pub fn realize(a: &SignPattern) -> Result<Realization, RealizeError> {
    if let Some(why) = hypothesis_failure(a) {
        return Err(RealizeError::HypothesisFails(why));
    }
    let x = minimal_ap_subpattern(a)?;
    let (y, map) = split_positive_diagonals(&x)?;
    let names = map.names();
    let mut steps = Vec::new();
    if !map.is_identity() {
        steps.push(TraceStep {
            rule: Rule::VertexSplit,
            stage: None,
            params: map
                .pairs
                .iter()
                .map(|p| {
                    (
                        (p.original + 1).to_string(),
                        format!("{}', {}''", p.original + 1, p.original + 1),
                    )
                })
                .collect(),
            epsilon: None,
            labels: names.clone(),
            pattern: y.clone(),
            residual: None,
        });
    }
    let (mut t, trace) = realize_case1_named(&y, &names)?;
    steps.extend(trace.steps);

    // contract every pair; `cur[i]` is the split index at working position i
    let mut cur: Vec<usize> = (0..y.order()).collect();
    let mut merged: Vec<Option<usize>> = vec![None; y.order()];
    for p in &map.pairs {
        let i1 = cur.iter().position(|&x| x == p.first).unwrap();
        let i2 = cur.iter().position(|&x| x == p.second).unwrap();
        let mut order = vec![i1, i2];
        order.extend((0..cur.len()).filter(|&i| i != i1 && i != i2));
        let sigma = Permutation::new(order).map_err(|e| broken("contract", e))?;
        t = t.permute(&sigma);
        cur = sigma.images().iter().map(|&i| cur[i]).collect();
        if (2..cur.len()).any(|c| t.matrix.get(1, c) > 0.0) {
            return Err(broken("contract", "outgoing row of a split pair has a positive entry"));
        }
        t = contract_pair(&t).map_err(|e| broken("contract", e))?;
        cur.remove(1);
        merged[p.first] = Some(p.original);
        let corner = t.matrix.get(0, 0);
        if !(corner > 0.0) {
            return Err(broken(
                "contract",
                format!("merged diagonal entry {corner} is not positive"),
            ));
        }
        let labels: Vec<String> = cur
            .iter()
            .map(|&i| match merged[i] {
                Some(o) => (o + 1).to_string(),
                None => names[i].clone(),
            })
            .collect();
        steps.push(TraceStep {
            rule: Rule::Contract,
            stage: None,
            params: BTreeMap::from([("index".to_string(), (p.original + 1).to_string())]),
            epsilon: None,
            labels,
            pattern: sign_of(&t.matrix, 0.0),
            residual: Some(t.relative_residual()),
        });
    }
    let pos: Vec<usize> = (0..x.order())
        .map(|o| cur.iter().position(|&i| map.origin[i] == o).unwrap())
        .collect();
    let sigma = Permutation::new(pos).map_err(|e| broken("undo split", e))?;
    t = t.permute(&sigma);
    if sign_of(&t.matrix, 0.0) != x {
        return Err(broken(
            "contract",
            "contracted matrix does not have the minimal subpattern's signs",
        ));
    }
    let (lifted, eps) = perturb_with_epsilon(&t, a).map_err(|e| broken("lift", e))?;
    t = lifted.normalized();
    if eps.is_some() {
        steps.push(TraceStep {
            rule: Rule::Lift,
            stage: None,
            params: BTreeMap::new(),
            epsilon: eps,
            labels: (1..=a.order()).map(|i| i.to_string()).collect(),
            pattern: sign_of(&t.matrix, 0.0),
            residual: Some(t.relative_residual()),
        });
    }
    if sign_of(&t.matrix, 0.0) != *a {
        return Err(broken("lift", "lifted matrix does not have the requested signs"));
    }
    t.check().map_err(|e| broken("final check", e))?;
    let (verdict, witness) = verify_algebraic_positivity(&t.matrix).map_err(RealizeError::Numerical)?;
    let (Some(lambda), Some(u), Some(v), Some(witness)) = (verdict.lambda, verdict.u, verdict.v, witness) else {
        return Err(broken("verify", "realized matrix is not certified"));
    };
    Ok(Realization {
        pattern: a.clone(),
        matrix: t.matrix,
        lambda,
        u,
        v,
        witness,
        trace: ConstructionTrace { steps },
    })
}

/// Realize A, or −A (negating the result) when only −A meets the hypothesis.
pub fn realize_up_to_sign(a: &SignPattern) -> Result<(Realization, bool), RealizeError> {
    match realize(a) {
        Ok(r) => Ok((r, false)),
        Err(RealizeError::HypothesisFails(why)) => {
            if !hypothesis_holds(&a.negate()) {
                return Err(RealizeError::HypothesisFails(why));
            }
            let r = realize(&a.negate())?;
            let m = r.matrix.scale(-1.0);
            let (verdict, witness) = verify_algebraic_positivity(&m).map_err(RealizeError::Numerical)?;
            let (Some(lambda), Some(u), Some(v), Some(witness)) = (verdict.lambda, verdict.u, verdict.v, witness)
            else {
                return Err(broken("verify", "negated matrix is not certified"));
            };
            Ok((
                Realization {
                    pattern: a.clone(),
                    matrix: m,
                    lambda,
                    u,
                    v,
                    witness,
                    trace: r.trace,
                },
                true,
            ))
        }
        Err(e) => Err(e),
    }
}
