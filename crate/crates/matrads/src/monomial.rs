//! Matrix monomials over a two-sorted operation alphabet and their
//! transverse-pair calculus.
//!
//! The alphabet has absolute symbols `t(m,n)` (m inputs, n outputs, degree
//! m+n-3) and morphism symbols `f(m,n)` (degree m+n-2); `1` is the
//! pass-through strand. A [`Class`] is a wiring diagram of such symbols up to
//! the block relation that merges a matrix product into entrywise composites,
//! kept in a canonical layered normal form. Matrices over classes multiply by
//! [`upsilon`], which is defined exactly when the pair carries a block
//! transverse-pair structure and is zero otherwise; the block cuts are forced
//! by the leaf sequences, so decompositions are unique. Strings of matrices
//! evaluate through any association that stays defined, and
//! [`normalize_string`] refactors the value into its maximal product of layer
//! matrices.
//!
//! [`Census`] enumerates the generator classes of each bidegree, either for
//! the free prematrad (absolute symbols only) or for the free relative
//! prematrad (every input-to-output path painted by exactly one `f`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

/// Default bound on `outputs + inputs` for generator enumeration.
pub const DEFAULT_BIDEGREE_CAP: u32 = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonomialError {
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("invalid composite: {0}")]
    InvalidComposite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bidegree ({0},{1}) exceeds the enumeration cap {2}; pass a larger cap to force the computation")]
    CapExceeded(u32, u32, u32),
}

// ---------------------------------------------------------------------------
// Generators and classes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GenKind {
    /// Absolute operation symbol.
    Theta,
    /// Morphism symbol; carries the painted layer of a relative monomial.
    F,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub kind: GenKind,
    pub inputs: u32,
    pub outputs: u32,
}

impl Generator {
    pub fn new(kind: GenKind, inputs: u32, outputs: u32) -> Result<Generator, MonomialError> {
        if inputs == 0 || outputs == 0 {
            return Err(MonomialError::InvalidGenerator(format!(
                "arities must be positive, got ({inputs},{outputs})"
            )));
        }
        if kind == GenKind::Theta && inputs == 1 && outputs == 1 {
            return Err(MonomialError::InvalidGenerator(
                "t(1,1) is the unit strand, not a generator".into(),
            ));
        }
        Ok(Generator {
            kind,
            inputs,
            outputs,
        })
    }

    pub fn theta(inputs: u32, outputs: u32) -> Result<Generator, MonomialError> {
        Generator::new(GenKind::Theta, inputs, outputs)
    }

    pub fn f_symbol(inputs: u32, outputs: u32) -> Result<Generator, MonomialError> {
        Generator::new(GenKind::F, inputs, outputs)
    }

    /// Homological degree: `t(m,n)` has m+n-3 and `f(m,n)` has m+n-2.
    pub fn degree(&self) -> u32 {
        match self.kind {
            GenKind::Theta => self.inputs + self.outputs - 3,
            GenKind::F => self.inputs + self.outputs - 2,
        }
    }

    pub fn transpose(&self) -> Generator {
        Generator {
            kind: self.kind,
            inputs: self.outputs,
            outputs: self.inputs,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            GenKind::Theta => 't',
            GenKind::F => 'f',
        };
        write!(f, "{}({},{})", tag, self.inputs, self.outputs)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A monomial class: an iterated two-layer composite of generators and unit
/// strands, stored in the canonical layered normal form produced by peeling
/// whole generations off the wiring diagram (input side preferred).
///
/// Equality, ordering, and hashing are therefore well defined on the
/// underlying diagrams, not on any particular product presentation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    /// The pass-through strand.
    Unit,
    Gen(Generator),
    Tp(Box<Tp>),
}

/// One composite layer: `row` feeds `col`. Entry `col[k]` consumes out-port
/// `k` of every `row` entry, so every `col` entry has `row.len()` inputs and
/// every `row` entry has `col.len()` outputs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tp {
    col: Vec<Class>,
    row: Vec<Class>,
}

impl Tp {
    pub fn col(&self) -> &[Class] {
        &self.col
    }

    pub fn row(&self) -> &[Class] {
        &self.row
    }
}

impl Class {
    /// Absolute symbol, with `t(1,1)` folded into the unit strand.
    pub fn theta(inputs: u32, outputs: u32) -> Result<Class, MonomialError> {
        if inputs == 1 && outputs == 1 {
            return Ok(Class::Unit);
        }
        Ok(Class::Gen(Generator::theta(inputs, outputs)?))
    }

    pub fn f_gen(inputs: u32, outputs: u32) -> Result<Class, MonomialError> {
        Ok(Class::Gen(Generator::f_symbol(inputs, outputs)?))
    }

    pub fn inputs(&self) -> u32 {
        match self {
            Class::Unit => 1,
            Class::Gen(g) => g.inputs,
            Class::Tp(t) => t.row.iter().map(Class::inputs).sum(),
        }
    }

    pub fn outputs(&self) -> u32 {
        match self {
            Class::Unit => 1,
            Class::Gen(g) => g.outputs,
            Class::Tp(t) => t.col.iter().map(Class::outputs).sum(),
        }
    }

    /// `(outputs, inputs)`.
    pub fn bidegree(&self) -> (u32, u32) {
        (self.outputs(), self.inputs())
    }

    /// Total homological degree of all symbols in the diagram.
    pub fn degree(&self) -> u32 {
        match self {
            Class::Unit => 0,
            Class::Gen(g) => g.degree(),
            Class::Tp(t) => {
                t.col.iter().map(Class::degree).sum::<u32>()
                    + t.row.iter().map(Class::degree).sum::<u32>()
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Class::Unit)
    }

    pub fn contains_f(&self) -> bool {
        match self {
            Class::Unit => false,
            Class::Gen(g) => g.kind == GenKind::F,
            Class::Tp(t) => {
                t.col.iter().any(Class::contains_f) || t.row.iter().any(Class::contains_f)
            }
        }
    }

    /// Compose one layer and renormalize. `col[k]` consumes out-port `k` of
    /// every `row` entry, so the arity checks here are exactly the
    /// transverse-pair conditions for a single block.
    pub fn tp(col: Vec<Class>, row: Vec<Class>) -> Result<Class, MonomialError> {
        if col.is_empty() || row.is_empty() {
            return Err(MonomialError::InvalidComposite(
                "a composite layer needs at least one entry on each side".into(),
            ));
        }
        let q = col.len() as u32;
        let p = row.len() as u32;
        for a in &col {
            if a.inputs() != p {
                return Err(MonomialError::InvalidComposite(format!(
                    "column entry {a} has {} inputs but the row has {p} entries",
                    a.inputs()
                )));
            }
        }
        for b in &row {
            if b.outputs() != q {
                return Err(MonomialError::InvalidComposite(format!(
                    "row entry {b} has {} outputs but the column has {q} entries",
                    b.outputs()
                )));
            }
        }
        let raw = Class::Tp(Box::new(Tp { col, row }));
        peel(&Graph::of(&raw))
    }

    /// Mirror the diagram, swapping inputs with outputs.
    pub fn transpose(&self) -> Class {
        // a mirrored canonical diagram still peels, from the other side
        peel(&Graph::of(self).transposed()).expect("mirror image of a class stays layered")
    }

    /// The number of `f` symbols crossed by every input-to-output path, if
    /// that number is uniform: `Some(0)` for absolute classes, `Some(1)` for
    /// relative ones.
    pub fn crossing_number(&self) -> Option<u32> {
        let g = Graph::of(self);
        let mut memo: Vec<Option<Option<u32>>> = vec![None; g.gens.len()];
        fn wire_value(g: &Graph, s: Src, memo: &mut Vec<Option<Option<u32>>>) -> Option<u32> {
            match s {
                Src::In(_) => Some(0),
                Src::Out { node, .. } => {
                    let below = node_value(g, node, memo)?;
                    Some(below + u32::from(g.gens[node].kind == GenKind::F))
                }
            }
        }
        fn node_value(g: &Graph, v: usize, memo: &mut Vec<Option<Option<u32>>>) -> Option<u32> {
            if let Some(cached) = memo[v] {
                return cached;
            }
            let mut agreed = None;
            for k in 0..g.node_in[v].len() {
                let val = wire_value(g, g.node_in[v][k], memo);
                match (agreed, val) {
                    (None, Some(x)) => agreed = Some(x),
                    (Some(a), Some(x)) if a == x => {}
                    _ => {
                        memo[v] = Some(None);
                        return None;
                    }
                }
            }
            memo[v] = Some(agreed);
            agreed
        }
        let mut common = None;
        for o in 0..g.out.len() {
            let val = wire_value(&g, g.out[o], &mut memo)?;
            match common {
                None => common = Some(val),
                Some(c) if c == val => {}
                _ => return None,
            }
        }
        common
    }

    /// All factorizations `self = a . (b_1 (x) ... (x) b_p)` into a single
    /// upper class over a row of subclasses (pass-through units allowed in
    /// the row). Includes the trivial split with an all-unit row; the
    /// whole-class-in-the-row split appears only when `self` has one output.
    pub fn row_splits(&self) -> Vec<(Class, Vec<Class>)> {
        let g = Graph::of(self);
        let nn = g.gens.len();
        assert!(nn <= 16, "split enumeration is meant for small classes");
        let cons = g.consumers();
        let mut out = vec![];
        'mask: for mask in 0u32..(1 << nn) {
            let in_s = |v: usize| mask & (1 << v) != 0;
            // the lower set must be closed toward the inputs
            for v in 0..nn {
                if !in_s(v) {
                    continue;
                }
                for &s in &g.node_in[v] {
                    if let Src::Out { node: w, .. } = s {
                        if !in_s(w) {
                            continue 'mask;
                        }
                    }
                }
            }
            if let Some(split) = try_row_split(&g, &cons, &|v| in_s(v)) {
                out.push(split);
            }
        }
        out
    }

    /// All factorizations `self = (a_1 (x) ... (x) a_q) . b` into a column of
    /// subclasses over a single lower class; the mirror of [`Class::row_splits`].
    pub fn col_splits(&self) -> Vec<(Vec<Class>, Class)> {
        self.transpose()
            .row_splits()
            .into_iter()
            .map(|(a, bs)| {
                (
                    bs.into_iter().map(|b| b.transpose()).collect(),
                    a.transpose(),
                )
            })
            .collect()
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Unit => write!(f, "1"),
            Class::Gen(g) => write!(f, "{g}"),
            Class::Tp(_) => {
                let factors = refactor(&Matrix::from_entry(self.clone()));
                let text = factors.iter().map(Matrix::to_string).join("*");
                write!(f, "{text}")
            }
        }
    }
}

impl fmt::Debug for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Wiring diagrams
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Src {
    In(usize),
    Out { node: usize, port: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dst {
    GlobalOut(usize),
    NodeIn { node: usize, port: usize },
}

/// Wiring diagram of a class: generator nodes and one wire per port. Wires
/// run from a source (global input or node out-port) to a unique consumer.
#[derive(Clone, Debug)]
struct Graph {
    gens: Vec<Generator>,
    node_in: Vec<Vec<Src>>,
    out: Vec<Src>,
    n_in: usize,
}

impl Graph {
    fn of(c: &Class) -> Graph {
        let m = c.inputs() as usize;
        let mut g = Graph {
            gens: vec![],
            node_in: vec![],
            out: vec![],
            n_in: m,
        };
        let srcs: Vec<Src> = (0..m).map(Src::In).collect();
        g.out = g.emit(c, &srcs);
        g
    }

    fn emit(&mut self, c: &Class, ins: &[Src]) -> Vec<Src> {
        match c {
            Class::Unit => ins.to_vec(),
            Class::Gen(gen) => {
                let id = self.gens.len();
                self.gens.push(*gen);
                self.node_in.push(ins.to_vec());
                (0..gen.outputs as usize)
                    .map(|port| Src::Out { node: id, port })
                    .collect()
            }
            Class::Tp(tp) => {
                let mut row_out = Vec::with_capacity(tp.row.len());
                let mut at = 0usize;
                for b in &tp.row {
                    let w = b.inputs() as usize;
                    row_out.push(self.emit(b, &ins[at..at + w]));
                    at += w;
                }
                let mut outs = vec![];
                for (k, a) in tp.col.iter().enumerate() {
                    let fan: Vec<Src> = row_out.iter().map(|o| o[k]).collect();
                    outs.extend(self.emit(a, &fan));
                }
                outs
            }
        }
    }

    fn consumers(&self) -> BTreeMap<Src, Dst> {
        let mut map = BTreeMap::new();
        for (i, &s) in self.out.iter().enumerate() {
            let prev = map.insert(s, Dst::GlobalOut(i));
            debug_assert!(prev.is_none(), "each source feeds exactly one wire");
        }
        for (v, ins) in self.node_in.iter().enumerate() {
            for (k, &s) in ins.iter().enumerate() {
                let prev = map.insert(s, Dst::NodeIn { node: v, port: k });
                debug_assert!(prev.is_none(), "each source feeds exactly one wire");
            }
        }
        map
    }

    /// Mirror image: every wire reversed, every generator transposed.
    fn transposed(&self) -> Graph {
        fn assign(out: &mut [Src], node_in: &mut [Vec<Src>], old_src: Src, new_src: Src) {
            match old_src {
                Src::In(i) => out[i] = new_src,
                Src::Out { node, port } => node_in[node][port] = new_src,
            }
        }
        let gens: Vec<Generator> = self.gens.iter().map(Generator::transpose).collect();
        let mut node_in: Vec<Vec<Src>> = gens
            .iter()
            .map(|g| vec![Src::In(usize::MAX); g.inputs as usize])
            .collect();
        let mut out: Vec<Src> = vec![Src::In(usize::MAX); self.n_in];
        for (i, &s) in self.out.iter().enumerate() {
            assign(&mut out, &mut node_in, s, Src::In(i));
        }
        for (v, ins) in self.node_in.iter().enumerate() {
            for (k, &s) in ins.iter().enumerate() {
                assign(&mut out, &mut node_in, s, Src::Out { node: v, port: k });
            }
        }
        debug_assert!(out.iter().all(|&s| s != Src::In(usize::MAX)));
        Graph {
            gens,
            node_in,
            out,
            n_in: self.out.len(),
        }
    }
}

/// Extract the subgraph on `nodes`. `in_wires` lists, in input order, the
/// sources in the ambient graph that feed this subgraph; `out_srcs` lists its
/// output sources (all on `nodes`).
fn extract(g: &Graph, nodes: &[usize], in_wires: &[Src], out_srcs: &[Src]) -> Option<Graph> {
    let mut new_id = BTreeMap::new();
    for (id, &v) in nodes.iter().enumerate() {
        new_id.insert(v, id);
    }
    let mut wire_pos = BTreeMap::new();
    for (j, &w) in in_wires.iter().enumerate() {
        wire_pos.insert(w, j);
    }
    let remap = |s: Src| -> Option<Src> {
        if let Some(&j) = wire_pos.get(&s) {
            return Some(Src::In(j));
        }
        match s {
            Src::Out { node, port } => new_id.get(&node).map(|&id| Src::Out { node: id, port }),
            Src::In(_) => None,
        }
    };
    let mut node_in = Vec::with_capacity(nodes.len());
    for &v in nodes {
        let ins: Option<Vec<Src>> = g.node_in[v].iter().map(|&s| remap(s)).collect();
        node_in.push(ins?);
    }
    let out: Option<Vec<Src>> = out_srcs.iter().map(|&s| remap(s)).collect();
    Some(Graph {
        gens: nodes.iter().map(|&v| g.gens[v]).collect(),
        node_in,
        out: out?,
        n_in: in_wires.len(),
    })
}

enum ColPiece {
    Unit,
    Sub(Graph),
}

/// Peel an input-side generation: nodes with all-global inputs become row
/// atoms (with pass-through units between them), the remaining nodes split
/// into column components. Peeling every eligible node at once is tried
/// first, so nested presentations of the same diagram flatten to one form;
/// a node whose siblings sit above a fork it feeds can make that shape
/// invalid, in which case smaller input generations are tried, largest
/// first. The search order only depends on the abstract diagram, so equal
/// diagrams still canonicalize identically. Returns `None` when no
/// generation layers from this side.
fn bottom_layer(g: &Graph) -> Option<(Vec<Class>, Vec<ColPiece>)> {
    if g.gens.is_empty() {
        return None;
    }
    let cons = g.consumers();
    let mut free: Vec<usize> = (0..g.gens.len())
        .filter(|&v| g.node_in[v].iter().all(|s| matches!(s, Src::In(_))))
        .collect();
    if free.len() == g.gens.len() {
        return None; // single generation; atoms are handled by the caller
    }
    // order candidates by first input position, an intrinsic key
    free.sort_by_key(|&v| match g.node_in[v].first() {
        Some(&Src::In(i)) => i,
        _ => usize::MAX,
    });
    let full: usize = (1 << free.len()) - 1;
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    masks.into_iter().find_map(|m| {
        let bottom: BTreeSet<usize> = free
            .iter()
            .enumerate()
            .filter(|&(k, _)| m >> k & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        layer_with(g, &cons, &bottom)
    })
}

/// One peel attempt with a fixed set of bottom nodes.
fn layer_with(
    g: &Graph,
    cons: &BTreeMap<Src, Dst>,
    bottom: &BTreeSet<usize>,
) -> Option<(Vec<Class>, Vec<ColPiece>)> {
    #[derive(Clone, Copy)]
    enum RowEnt {
        Unit(usize),
        Node(usize),
    }
    let mut row_src: Vec<RowEnt> = vec![];
    let mut seen = BTreeSet::new();
    let mut i = 0usize;
    while i < g.n_in {
        match cons[&Src::In(i)] {
            Dst::NodeIn { node: v, port } if bottom.contains(&v) => {
                if port != 0 {
                    return None;
                }
                let ar = g.gens[v].inputs as usize;
                for d in 0..ar {
                    if g.node_in[v][d] != Src::In(i + d) {
                        return None;
                    }
                }
                if !seen.insert(v) {
                    return None;
                }
                row_src.push(RowEnt::Node(v));
                i += ar;
            }
            Dst::GlobalOut(_) => return None,
            _ => {
                row_src.push(RowEnt::Unit(i));
                i += 1;
            }
        }
    }
    if seen.len() != bottom.len() {
        return None;
    }

    // connected components of the part above the peeled generation
    let upper: Vec<usize> = (0..g.gens.len()).filter(|v| !bottom.contains(v)).collect();
    let mut comp = vec![usize::MAX; g.gens.len()];
    let mut nc = 0usize;
    for &v in &upper {
        if comp[v] != usize::MAX {
            continue;
        }
        comp[v] = nc;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &s in &g.node_in[u] {
                if let Src::Out { node: w, .. } = s {
                    if comp[w] == usize::MAX && !bottom.contains(&w) {
                        comp[w] = nc;
                        stack.push(w);
                    }
                }
            }
            for port in 0..g.gens[u].outputs as usize {
                if let Dst::NodeIn { node: w, .. } = cons[&Src::Out { node: u, port }] {
                    if comp[w] == usize::MAX && !bottom.contains(&w) {
                        comp[w] = nc;
                        stack.push(w);
                    }
                }
            }
        }
        nc += 1;
    }

    // column entries in output order; each component owns one contiguous run
    #[derive(Clone, Copy, PartialEq)]
    enum ColEnt {
        UnitWire(Src),
        Comp(usize),
    }
    let mut col_src: Vec<ColEnt> = vec![];
    let mut comp_col: Vec<Option<usize>> = vec![None; nc];
    let mut comp_run: Vec<(usize, usize)> = vec![(0, 0); nc]; // output span per component
    let mut o = 0usize;
    while o < g.out.len() {
        match g.out[o] {
            Src::In(_) => return None,
            Src::Out { node: v, .. } if bottom.contains(&v) => {
                col_src.push(ColEnt::UnitWire(g.out[o]));
                o += 1;
            }
            Src::Out { node: v, .. } => {
                let c = comp[v];
                if comp_col[c].is_some() {
                    return None; // outputs of this component are not contiguous
                }
                comp_col[c] = Some(col_src.len());
                col_src.push(ColEnt::Comp(c));
                let start = o;
                while o < g.out.len() {
                    match g.out[o] {
                        Src::Out { node: w, .. } if !bottom.contains(&w) && comp[w] == c => o += 1,
                        _ => break,
                    }
                }
                comp_run[c] = (start, o);
            }
        }
    }
    if comp_col.iter().any(Option::is_none) {
        return None;
    }

    let q = col_src.len();
    let mut row: Vec<Class> = vec![];
    for re in &row_src {
        match *re {
            RowEnt::Unit(_) => {
                if q != 1 {
                    return None;
                }
                row.push(Class::Unit);
            }
            RowEnt::Node(v) => {
                if g.gens[v].outputs as usize != q {
                    return None;
                }
                row.push(Class::Gen(g.gens[v]));
            }
        }
    }
    let p = row.len();

    // out-port k of every row entry must feed column entry k
    for re in &row_src {
        for (k, ce) in col_src.iter().enumerate() {
            let wire = match *re {
                RowEnt::Unit(i) => Src::In(i),
                RowEnt::Node(v) => Src::Out { node: v, port: k },
            };
            match *ce {
                ColEnt::UnitWire(s) => {
                    if p != 1 || s != wire {
                        return None;
                    }
                }
                ColEnt::Comp(c) => match cons.get(&wire) {
                    Some(Dst::NodeIn { node: w, .. }) if comp[*w] == c => {}
                    _ => return None,
                },
            }
        }
    }

    let mut pieces = vec![];
    for (k, ce) in col_src.iter().enumerate() {
        match *ce {
            ColEnt::UnitWire(_) => pieces.push(ColPiece::Unit),
            ColEnt::Comp(c) => {
                let nodes: Vec<usize> = upper.iter().copied().filter(|&v| comp[v] == c).collect();
                let in_wires: Vec<Src> = row_src
                    .iter()
                    .map(|re| match *re {
                        RowEnt::Unit(i) => Src::In(i),
                        RowEnt::Node(v) => Src::Out { node: v, port: k },
                    })
                    .collect();
                let (lo, hi) = comp_run[c];
                let out_srcs: Vec<Src> = g.out[lo..hi].to_vec();
                pieces.push(ColPiece::Sub(extract(g, &nodes, &in_wires, &out_srcs)?));
            }
        }
    }
    Some((row, pieces))
}

/// Canonical form of a wiring diagram: peel generations off the input side,
/// falling back to the output side when the input side does not layer.
fn peel(g: &Graph) -> Result<Class, MonomialError> {
    if g.gens.is_empty() {
        if g.n_in == 1 && g.out == vec![Src::In(0)] {
            return Ok(Class::Unit);
        }
        return Err(MonomialError::InvalidComposite(
            "bare strands do not form a single class".into(),
        ));
    }
    if g.gens.len() == 1 {
        let gen = g.gens[0];
        let ins_ok = g.n_in == gen.inputs as usize
            && g.node_in[0].iter().enumerate().all(|(k, &s)| s == Src::In(k));
        let outs_ok = g.out.len() == gen.outputs as usize
            && g
                .out
                .iter()
                .enumerate()
                .all(|(o, &s)| s == Src::Out { node: 0, port: o });
        if ins_ok && outs_ok {
            return Ok(Class::Gen(gen));
        }
    }
    if let Some((row, pieces)) = bottom_layer(g) {
        let col: Result<Vec<Class>, MonomialError> = pieces
            .iter()
            .map(|pc| match pc {
                ColPiece::Unit => Ok(Class::Unit),
                ColPiece::Sub(sub) => peel(sub),
            })
            .collect();
        return Ok(Class::Tp(Box::new(Tp { col: col?, row })));
    }
    let t = g.transposed();
    if let Some((row_t, pieces_t)) = bottom_layer(&t) {
        // the transposed graph already carries transposed generators, so
        // mirroring its atoms and sub-diagrams restores our orientation
        let col: Vec<Class> = row_t
            .iter()
            .map(|c| match c {
                Class::Unit => Class::Unit,
                Class::Gen(g) => Class::Gen(g.transpose()),
                Class::Tp(_) => unreachable!("peeled rows are atomic"),
            })
            .collect();
        let row: Result<Vec<Class>, MonomialError> = pieces_t
            .iter()
            .map(|pc| match pc {
                ColPiece::Unit => Ok(Class::Unit),
                ColPiece::Sub(sub) => peel(&sub.transposed()),
            })
            .collect();
        return Ok(Class::Tp(Box::new(Tp { col, row: row? })));
    }
    Err(MonomialError::InvalidComposite(
        "diagram admits no layered factorization".into(),
    ))
}

/// One two-layer split attempt for [`Class::row_splits`]: the masked node set
/// becomes the row, the complement the single upper class.
fn try_row_split(
    g: &Graph,
    cons: &BTreeMap<Src, Dst>,
    in_s: &dyn Fn(usize) -> bool,
) -> Option<(Class, Vec<Class>)> {
    let nn = g.gens.len();
    let lower: Vec<usize> = (0..nn).filter(|&v| in_s(v)).collect();
    let upper: Vec<usize> = (0..nn).filter(|&v| !in_s(v)).collect();

    // components of the lower set (its nodes only consume global inputs or
    // each other, since the set is closed toward the inputs)
    let mut comp = vec![usize::MAX; nn];
    let mut nc = 0usize;
    for &v in &lower {
        if comp[v] != usize::MAX {
            continue;
        }
        comp[v] = nc;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &s in &g.node_in[u] {
                if let Src::Out { node: w, .. } = s {
                    if comp[w] == usize::MAX {
                        comp[w] = nc;
                        stack.push(w);
                    }
                }
            }
            for port in 0..g.gens[u].outputs as usize {
                if let Some(Dst::NodeIn { node: w, .. }) = cons.get(&Src::Out { node: u, port }) {
                    if in_s(*w) && comp[*w] == usize::MAX {
                        comp[*w] = nc;
                        stack.push(*w);
                    }
                }
            }
        }
        nc += 1;
    }

    // each lower component must expose exactly one output wire
    let mut comp_out: Vec<Option<Src>> = vec![None; nc];
    for &v in &lower {
        for port in 0..g.gens[v].outputs as usize {
            let s = Src::Out { node: v, port };
            let external = match cons[&s] {
                Dst::GlobalOut(_) => true,
                Dst::NodeIn { node: w, .. } => !in_s(w),
            };
            if external {
                let c = comp[v];
                if comp_out[c].is_some() {
                    return None;
                }
                comp_out[c] = Some(s);
            }
        }
    }
    if comp_out.iter().any(Option::is_none) {
        return None;
    }

    // row assembly: walk the global inputs
    let mut row_wires: Vec<Src> = vec![]; // the wire each row entry sends up
    let mut row: Vec<Class> = vec![];
    let mut placed: Vec<bool> = vec![false; nc];
    let mut comp_inputs: Vec<Vec<usize>> = vec![vec![]; nc];
    for i in 0..g.n_in {
        if let Dst::NodeIn { node: v, .. } = cons[&Src::In(i)] {
            if in_s(v) {
                comp_inputs[comp[v]].push(i);
            }
        }
    }
    let mut i = 0usize;
    while i < g.n_in {
        match cons[&Src::In(i)] {
            Dst::NodeIn { node: v, .. } if in_s(v) => {
                let c = comp[v];
                if placed[c] {
                    return None;
                }
                placed[c] = true;
                // the component must own a contiguous input run starting here
                let ins = &comp_inputs[c];
                for (d, &pos) in ins.iter().enumerate() {
                    if pos != i + d {
                        return None;
                    }
                }
                let nodes: Vec<usize> = lower.iter().copied().filter(|&v| comp[v] == c).collect();
                let in_wires: Vec<Src> = ins.iter().map(|&pos| Src::In(pos)).collect();
                let out_src = comp_out[c].expect("checked above");
                let sub = extract(g, &nodes, &in_wires, &[out_src])?;
                row.push(peel(&sub).ok()?);
                row_wires.push(out_src);
                i += ins.len();
            }
            Dst::GlobalOut(_) => return None,
            _ => {
                row.push(Class::Unit);
                row_wires.push(Src::In(i));
                i += 1;
            }
        }
    }
    if placed.iter().any(|&b| !b) {
        return None;
    }

    if upper.is_empty() {
        // upper side collapses to a unit: only legal over a single row entry
        if row.len() == 1 && g.out.len() == 1 {
            return Some((Class::Unit, row));
        }
        return None;
    }
    // the upper side must form one class over the row wires
    for &s in &g.out {
        match s {
            Src::Out { node, .. } if !in_s(node) => {}
            _ => return None,
        }
    }
    let sub = extract(g, &upper, &row_wires, &g.out)?;
    // connectivity of the upper diagram: peel fails on strand bundles, but a
    // disconnected union of classes would still peel, so check reachability
    if !connected(&sub) {
        return None;
    }
    let a = peel(&sub).ok()?;
    Some((a, row))
}

fn connected(g: &Graph) -> bool {
    if g.gens.len() <= 1 {
        return true;
    }
    let cons = g.consumers();
    let mut seen = BTreeSet::new();
    let mut stack = vec![0usize];
    seen.insert(0usize);
    while let Some(v) = stack.pop() {
        for &s in &g.node_in[v] {
            if let Src::Out { node: w, .. } = s {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        for port in 0..g.gens[v].outputs as usize {
            if let Some(Dst::NodeIn { node: w, .. }) = cons.get(&Src::Out { node: v, port }) {
                if seen.insert(*w) {
                    stack.push(*w);
                }
            }
        }
    }
    seen.len() == g.gens.len()
}

// ---------------------------------------------------------------------------
// Matrices and the transverse-pair product
// ---------------------------------------------------------------------------

/// A rectangular matrix of classes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Class>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<Class>>) -> Result<Matrix, MonomialError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MonomialError::MalformedMatrix("matrix is empty".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MonomialError::MalformedMatrix(
                "rows have unequal lengths".into(),
            ));
        }
        let nrows = rows.len();
        Ok(Matrix {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_entry(c: Class) -> Matrix {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![c],
        }
    }

    pub fn row_vector(entries: Vec<Class>) -> Result<Matrix, MonomialError> {
        Matrix::new(vec![entries])
    }

    pub fn col_vector(entries: Vec<Class>) -> Result<Matrix, MonomialError> {
        Matrix::new(entries.into_iter().map(|c| vec![c]).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Class {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Class> {
        self.data.iter()
    }

    pub fn is_all_units(&self) -> bool {
        self.data.iter().all(Class::is_unit)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.entry(i, j).transpose());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Row leaf sequence: the common input arity of each column, indexed left
    /// to right, undefined when some column mixes arities.
    pub fn rls(&self) -> Option<Vec<u32>> {
        let mut seq = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let first = self.entry(0, j).inputs();
            for i in 1..self.rows {
                if self.entry(i, j).inputs() != first {
                    return None;
                }
            }
            seq.push(first);
        }
        Some(seq)
    }

    /// Column leaf sequence: the common output arity of each row, indexed top
    /// to bottom, undefined when some row mixes arities.
    pub fn cls(&self) -> Option<Vec<u32>> {
        let mut seq = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let first = self.entry(i, 0).outputs();
            for j in 1..self.cols {
                if self.entry(i, j).outputs() != first {
                    return None;
                }
            }
            seq.push(first);
        }
        Some(seq)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                match self.entry(i, j) {
                    c @ Class::Tp(_) => write!(f, "({c})")?,
                    c => write!(f, "{c}")?,
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Both leaf sequences of a matrix.
pub fn leaf_sequences(a: &Matrix) -> (Option<Vec<u32>>, Option<Vec<u32>>) {
    (a.rls(), a.cls())
}

/// Block structure of a composable pair. The cuts are forced: row `i` of `b`
/// is cut by the column arities of `a`, and the columns of `a` are cut by the
/// row arities of `b`, so the decomposition is unique when it exists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BtpBlocks {
    /// `rls(a)`: width of the `b`-column group feeding each column of `a`.
    pub col_cuts: Vec<u32>,
    /// `cls(b)`: height of the `a`-row group fed by each row of `b`.
    pub row_cuts: Vec<u32>,
    /// `grid[i][j]` = (column classes from `a`, row classes from `b`).
    pub grid: Vec<Vec<(Vec<Class>, Vec<Class>)>>,
}

pub fn btp_decompose(a: &Matrix, b: &Matrix) -> Option<BtpBlocks> {
    let x = a.rls()?;
    let y = b.cls()?;
    if x.iter().sum::<u32>() as usize != b.cols() {
        return None;
    }
    if y.iter().sum::<u32>() as usize != a.rows() {
        return None;
    }
    let mut row_off = vec![0usize];
    for &h in &y {
        row_off.push(row_off.last().unwrap() + h as usize);
    }
    let mut col_off = vec![0usize];
    for &w in &x {
        col_off.push(col_off.last().unwrap() + w as usize);
    }
    let mut grid = Vec::with_capacity(b.rows());
    for i in 0..b.rows() {
        let mut line = Vec::with_capacity(a.cols());
        for j in 0..a.cols() {
            let colv: Vec<Class> = (row_off[i]..row_off[i + 1])
                .map(|r| a.entry(r, j).clone())
                .collect();
            let rowv: Vec<Class> = (col_off[j]..col_off[j + 1])
                .map(|c| b.entry(i, c).clone())
                .collect();
            line.push((colv, rowv));
        }
        grid.push(line);
    }
    Some(BtpBlocks {
        col_cuts: x,
        row_cuts: y,
        grid,
    })
}

fn upsilon_matrix(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let blocks = btp_decompose(a, b)?;
    let mut rows = Vec::with_capacity(blocks.grid.len());
    for line in &blocks.grid {
        let mut out = Vec::with_capacity(line.len());
        for (colv, rowv) in line {
            // arities inside each block are forced by the leaf sequences
            out.push(Class::tp(colv.clone(), rowv.clone()).expect("block layer composes"));
        }
        rows.push(out);
    }
    Some(Matrix::new(rows).expect("block grid is rectangular"))
}

/// The transverse-pair product: the matrix of blockwise composites when the
/// pair decomposes, and zero otherwise.
pub fn upsilon(a: &Matrix, b: &Matrix) -> Expr {
    match upsilon_matrix(a, b) {
        Some(m) => Expr::Product(vec![m]),
        None => Expr::Zero,
    }
}

// ---------------------------------------------------------------------------
// Expressions: strings of matrices
// ---------------------------------------------------------------------------

/// A monomial expression: zero, or a nonempty product of matrices with the
/// output side leftmost.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Zero,
    Product(Vec<Matrix>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Zero => write!(f, "0"),
            Expr::Product(ms) => write!(f, "{}", ms.iter().map(Matrix::to_string).join("*")),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Evaluate an expression to a single matrix, or to zero when no association
/// of the string composes. All defined associations agree on the underlying
/// diagrams, so the search only decides definedness.
pub fn evaluate(e: &Expr) -> Expr {
    match e {
        Expr::Zero => Expr::Zero,
        Expr::Product(f) => match evaluate_product(f) {
            Some(m) => Expr::Product(vec![m]),
            None => Expr::Zero,
        },
    }
}

fn evaluate_product(factors: &[Matrix]) -> Option<Matrix> {
    let k = factors.len();
    if k == 0 {
        return None;
    }
    let mut table: Vec<Vec<Option<Matrix>>> = vec![vec![None; k]; k];
    for (i, m) in factors.iter().enumerate() {
        table[i][i] = Some(m.clone());
    }
    for len in 2..=k {
        for i in 0..=k - len {
            let j = i + len - 1;
            for cut in i..j {
                let pair = (table[i][cut].clone(), table[cut + 1][j].clone());
                if let (Some(a), Some(b)) = pair {
                    if let Some(m) = upsilon_matrix(&a, &b) {
                        table[i][j] = Some(m);
                        break;
                    }
                }
            }
        }
    }
    table[0][k - 1].clone()
}

/// Canonical string form: evaluate, then refactor the value into the maximal
/// product of layer matrices, peeling generations off the input side first.
/// Constant on equivalence classes because evaluation is; idempotent because
/// the refactored string evaluates back to the same matrix.
pub fn normalize_string(e: &Expr) -> Expr {
    match evaluate(e) {
        Expr::Zero => Expr::Zero,
        Expr::Product(ms) => {
            let m = ms.into_iter().next().expect("evaluate yields one factor");
            Expr::Product(refactor(&m))
        }
    }
}

fn refactor(m: &Matrix) -> Vec<Matrix> {
    if let Some((a, b)) = split_input_layer(m) {
        let mut s = refactor(&a);
        s.push(b);
        return s;
    }
    if let Some((a, b)) = split_output_layer(m) {
        let mut s = vec![a];
        s.extend(refactor(&b));
        return s;
    }
    vec![m.clone()]
}

/// Split `m = a * b` with `b` the input-side generation of every entry
/// (atoms sink into `b` under a unit column). Fails when the per-entry peels
/// do not align into rectangular factors.
fn split_input_layer(m: &Matrix) -> Option<(Matrix, Matrix)> {
    let mut piece: Vec<Vec<(Vec<Class>, Vec<Class>)>> = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut line = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            let split = match m.entry(i, j) {
                Class::Unit => (vec![Class::Unit], vec![Class::Unit]),
                Class::Gen(g) => (
                    vec![Class::Unit; g.outputs as usize],
                    vec![Class::Gen(*g)],
                ),
                e @ Class::Tp(_) => {
                    let (row, pieces) = bottom_layer(&Graph::of(e))?;
                    let col: Option<Vec<Class>> = pieces
                        .iter()
                        .map(|pc| match pc {
                            ColPiece::Unit => Some(Class::Unit),
                            ColPiece::Sub(sub) => peel(sub).ok(),
                        })
                        .collect();
                    (col?, row)
                }
            };
            line.push(split);
        }
        piece.push(line);
    }
    // the peels must align: constant row widths per column, constant column
    // heights per row
    for j in 0..m.cols() {
        let w = piece[0][j].1.len();
        if (1..m.rows()).any(|i| piece[i][j].1.len() != w) {
            return None;
        }
    }
    for (i, line) in piece.iter().enumerate() {
        let h = line[0].0.len();
        if (1..m.cols()).any(|j| piece[i][j].0.len() != h) {
            return None;
        }
    }
    let mut arows: Vec<Vec<Class>> = vec![];
    for line in &piece {
        let h = line[0].0.len();
        for r in 0..h {
            arows.push(line.iter().map(|(colv, _)| colv[r].clone()).collect());
        }
    }
    let brows: Vec<Vec<Class>> = piece
        .iter()
        .map(|line| line.iter().flat_map(|(_, rowv)| rowv.iter().cloned()).collect())
        .collect();
    let a = Matrix::new(arows).ok()?;
    let b = Matrix::new(brows).ok()?;
    if a.is_all_units() || b.is_all_units() {
        return None;
    }
    debug_assert_eq!(upsilon_matrix(&a, &b).as_ref(), Some(m));
    Some((a, b))
}

fn split_output_layer(m: &Matrix) -> Option<(Matrix, Matrix)> {
    let (a, b) = split_input_layer(&m.transpose())?;
    Some((b.transpose(), a.transpose()))
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Parse an expression: `t(m,n)` and `f(m,n)` (inputs first), `1` for the
/// unit strand, matrices as `[[a,b],[c,d]]`, strings as `M1*M2*...`, and
/// parenthesized subexpressions as composite entries.
pub fn parse_expr(text: &str) -> Result<Expr, MonomialError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(MonomialError::Parse(format!(
            "unexpected trailing input at byte {}",
            p.pos
        )));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), MonomialError> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            other => Err(MonomialError::Parse(format!(
                "expected '{}', found {:?}",
                c as char,
                other.map(|b| b as char)
            ))),
        }
    }

    fn number(&mut self) -> Result<u32, MonomialError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(MonomialError::Parse(format!(
                "expected a number at byte {start}"
            )));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are utf8")
            .parse()
            .map_err(|_| MonomialError::Parse("number out of range".into()))
    }

    fn expr(&mut self) -> Result<Expr, MonomialError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(b'*') {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(Expr::Product(factors))
    }

    fn factor(&mut self) -> Result<Matrix, MonomialError> {
        match self.peek() {
            Some(b'[') => self.matrix(),
            Some(_) => Ok(Matrix::from_entry(self.entry()?)),
            None => Err(MonomialError::Parse("unexpected end of input".into())),
        }
    }

    fn matrix(&mut self) -> Result<Matrix, MonomialError> {
        self.expect(b'[')?;
        let mut rows = vec![self.matrix_row()?];
        while self.peek() == Some(b',') {
            self.bump();
            rows.push(self.matrix_row()?);
        }
        self.expect(b']')?;
        Matrix::new(rows)
    }

    fn matrix_row(&mut self) -> Result<Vec<Class>, MonomialError> {
        self.expect(b'[')?;
        let mut entries = vec![self.entry()?];
        while self.peek() == Some(b',') {
            self.bump();
            entries.push(self.entry()?);
        }
        self.expect(b']')?;
        Ok(entries)
    }

    fn entry(&mut self) -> Result<Class, MonomialError> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let n = self.number()?;
                if n == 1 {
                    Ok(Class::Unit)
                } else {
                    Err(MonomialError::Parse(format!(
                        "only the unit strand 1 is a bare scalar, found {n}"
                    )))
                }
            }
            Some(c @ (b't' | b'f')) => {
                self.bump();
                self.expect(b'(')?;
                let m = self.number()?;
                self.expect(b',')?;
                let n = self.number()?;
                self.expect(b')')?;
                let gen = if c == b't' {
                    Generator::theta(m, n)
                } else {
                    Generator::f_symbol(m, n)
                }
                .map_err(|e| MonomialError::Parse(e.to_string()))?;
                Ok(Class::Gen(gen))
            }
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(b')')?;
                match evaluate(&e) {
                    Expr::Zero => Err(MonomialError::Parse(
                        "parenthesized entry is an undefined product".into(),
                    )),
                    Expr::Product(ms) => {
                        let m = &ms[0];
                        if m.rows() == 1 && m.cols() == 1 {
                            Ok(m.entry(0, 0).clone())
                        } else {
                            Err(MonomialError::Parse(
                                "parenthesized entry must evaluate to a single class".into(),
                            ))
                        }
                    }
                }
            }
            other => Err(MonomialError::Parse(format!(
                "expected an entry, found {:?}",
                other.map(|b| b as char)
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Generator enumeration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Flavor {
    /// Absolute symbols only.
    Prematrad,
    /// Every input-to-output path painted by exactly one `f`.
    Relative,
}

/// All positive integer vectors of the given length summing to `total`.
pub(crate) fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = vec![];
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Memoized enumeration of generator classes by bidegree `(n, m)` =
/// (outputs, inputs). Every class of a composite bidegree arises as a layer
/// over strictly smaller constituents, which grounds the recursion; the one
/// same-bidegree pool a layer could ask for would force an all-unit side and
/// is skipped.
pub struct Census {
    cap: u32,
    abs: BTreeMap<(u32, u32), Vec<Class>>,
    rel: BTreeMap<(u32, u32), Vec<Class>>,
}

impl Census {
    pub fn new(cap: u32) -> Census {
        Census {
            cap,
            abs: BTreeMap::new(),
            rel: BTreeMap::new(),
        }
    }

    pub fn with_default_cap() -> Census {
        Census::new(DEFAULT_BIDEGREE_CAP)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Free prematrad generators of bidegree `(n, m)`, the unit included at
    /// `(1, 1)`.
    pub fn absolute(&mut self, n: u32, m: u32) -> Result<Vec<Class>, MonomialError> {
        self.ensure_abs(n, m)?;
        Ok(self.abs[&(n, m)].clone())
    }

    /// Free relative prematrad generators of bidegree `(n, m)`.
    pub fn relative(&mut self, n: u32, m: u32) -> Result<Vec<Class>, MonomialError> {
        self.ensure_rel(n, m)?;
        Ok(self.rel[&(n, m)].clone())
    }

    fn check_cap(&self, n: u32, m: u32) -> Result<(), MonomialError> {
        if n == 0 || m == 0 {
            return Err(MonomialError::InvalidGenerator(
                "bidegree components must be positive".into(),
            ));
        }
        if n + m > self.cap {
            return Err(MonomialError::CapExceeded(n, m, self.cap));
        }
        Ok(())
    }

    fn ensure_abs(&mut self, n: u32, m: u32) -> Result<(), MonomialError> {
        if self.abs.contains_key(&(n, m)) {
            return Ok(());
        }
        self.check_cap(n, m)?;
        if (n, m) == (1, 1) {
            self.abs.insert((1, 1), vec![Class::Unit]);
            return Ok(());
        }
        let mut found: BTreeSet<Class> = BTreeSet::new();
        found.insert(Class::Gen(Generator::theta(m, n)?));
        for q in 1..=n {
            for p in 1..=m {
                for comp_n in compositions(n, q) {
                    // a full-bidegree column entry forces an all-unit row
                    if comp_n.iter().any(|&nk| nk + p == n + m) {
                        continue;
                    }
                    let mut col_pools = Vec::with_capacity(comp_n.len());
                    for &nk in &comp_n {
                        self.ensure_abs(nk, p)?;
                        col_pools.push(self.abs[&(nk, p)].clone());
                    }
                    for comp_m in compositions(m, p) {
                        if comp_m.iter().any(|&mj| q + mj == n + m) {
                            continue;
                        }
                        let mut row_pools = Vec::with_capacity(comp_m.len());
                        let mut ok = true;
                        for &mj in &comp_m {
                            self.ensure_abs(q, mj)?;
                            row_pools.push(self.abs[&(q, mj)].clone());
                            ok &= !row_pools.last().unwrap().is_empty();
                        }
                        if !ok {
                            continue;
                        }
                        self.collect_layers(&col_pools, &row_pools, (n, m), &mut found)?;
                    }
                }
            }
        }
        self.abs.insert((n, m), found.into_iter().collect());
        Ok(())
    }

    fn ensure_rel(&mut self, n: u32, m: u32) -> Result<(), MonomialError> {
        if self.rel.contains_key(&(n, m)) {
            return Ok(());
        }
        self.check_cap(n, m)?;
        let mut found: BTreeSet<Class> = BTreeSet::new();
        found.insert(Class::Gen(Generator::f_symbol(m, n)?));
        if (n, m) == (1, 1) {
            self.rel.insert((1, 1), found.into_iter().collect());
            return Ok(());
        }
        for q in 1..=n {
            for p in 1..=m {
                // painted layer in the row: absolute columns over relative rows
                for comp_n in compositions(n, q) {
                    let mut col_pools = Vec::with_capacity(comp_n.len());
                    for &nk in &comp_n {
                        self.ensure_abs(nk, p)?;
                        col_pools.push(self.abs[&(nk, p)].clone());
                    }
                    for comp_m in compositions(m, p) {
                        // the full-bidegree relative pool would need an
                        // all-unit absolute side; skip it (also grounds the
                        // recursion)
                        if comp_m.iter().any(|&mj| (q, mj) == (n, m)) {
                            continue;
                        }
                        let mut row_pools = Vec::with_capacity(comp_m.len());
                        for &mj in &comp_m {
                            self.ensure_rel(q, mj)?;
                            row_pools.push(self.rel[&(q, mj)].clone());
                        }
                        self.collect_layers(&col_pools, &row_pools, (n, m), &mut found)?;
                    }
                }
                // painted layer in the column: relative columns over absolute rows
                for comp_n in compositions(n, q) {
                    if comp_n.iter().any(|&nk| (nk, p) == (n, m)) {
                        continue;
                    }
                    let mut col_pools = Vec::with_capacity(comp_n.len());
                    let mut fetch_ok = true;
                    for &nk in &comp_n {
                        self.ensure_rel(nk, p)?;
                        col_pools.push(self.rel[&(nk, p)].clone());
                        fetch_ok &= !col_pools.last().unwrap().is_empty();
                    }
                    if !fetch_ok {
                        continue;
                    }
                    for comp_m in compositions(m, p) {
                        let mut row_pools = Vec::with_capacity(comp_m.len());
                        for &mj in &comp_m {
                            self.ensure_abs(q, mj)?;
                            row_pools.push(self.abs[&(q, mj)].clone());
                        }
                        self.collect_layers(&col_pools, &row_pools, (n, m), &mut found)?;
                    }
                }
            }
        }
        self.rel.insert((n, m), found.into_iter().collect());
        Ok(())
    }

    fn collect_layers(
        &self,
        col_pools: &[Vec<Class>],
        row_pools: &[Vec<Class>],
        bidegree: (u32, u32),
        found: &mut BTreeSet<Class>,
    ) -> Result<(), MonomialError> {
        for col in col_pools
            .iter()
            .map(|p| p.iter().cloned())
            .multi_cartesian_product()
        {
            if col.iter().all(Class::is_unit) {
                continue;
            }
            for row in row_pools
                .iter()
                .map(|p| p.iter().cloned())
                .multi_cartesian_product()
            {
                if row.iter().all(Class::is_unit) {
                    continue;
                }
                let c = Class::tp(col.clone(), row)?;
                debug_assert_eq!(c.bidegree(), bidegree);
                found.insert(c);
            }
        }
        Ok(())
    }
}

/// Generator classes of bidegree `(n, m)` in the requested flavor, sorted.
pub fn enumerate_generators(
    n: u32,
    m: u32,
    flavor: Flavor,
    cap: u32,
) -> Result<Vec<Class>, MonomialError> {
    let mut census = Census::new(cap);
    match flavor {
        Flavor::Prematrad => census.absolute(n, m),
        Flavor::Relative => census.relative(n, m),
    }
}

// ---------------------------------------------------------------------------
