use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use super::deps::Deps;
use super::store::{inv, CId, RId, Store, Term};
use super::{Budget, ReasonerError};

pub(crate) type NodeId = u32;

const P_NOMINAL: u8 = 0;
const P_AND: u8 = 1;
const P_FORALL: u8 = 2;
const P_OR: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    /// Carries a nominal; never blocked.
    Named,
    /// Root of a concept satisfiability test; never blocked.
    Root,
    Blockable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Live,
    Merged(NodeId),
    Pruned,
}

#[derive(Clone)]
struct Node {
    label: im::OrdMap<CId, Deps>,
    hash: u64,
    kind: Kind,
    status: Status,
    parent: Option<NodeId>,
    neighbors: im::OrdMap<NodeId, im::OrdMap<RId, Deps>>,
    /// Disjunctions currently satisfied without choosing a disjunct.
    lazies: im::OrdSet<CId>,
}

#[derive(Clone, Default)]
struct State {
    nodes: im::Vector<Node>,
    agenda: im::OrdSet<(u8, NodeId, CId)>,
    pending: im::OrdSet<(NodeId, CId)>,
    homes: im::OrdMap<CId, NodeId>,
}

#[derive(Clone)]
struct BranchPoint {
    snapshot: State,
    node: NodeId,
    alts: Arc<[CId]>,
    next: usize,
    base: Deps,
    acc: Deps,
}

pub(crate) enum Stop {
    Clash(Deps),
    Limit(ReasonerError),
}

type Step = Result<(), Stop>;

enum Disjunct {
    True,
    Lazy,
    Closed(Deps),
    Open,
}

fn mix(c: CId) -> u64 {
    let mut z = (c as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One completion graph plus its branch stack. Cloning is cheap: all state is
/// persistent, which is also how branch points snapshot it.
#[derive(Clone)]
pub(crate) struct Engine {
    pub store: Store,
    clauses: Arc<[CId]>,
    state: State,
    stack: im::Vector<BranchPoint>,
    /// Facts re-asserted after every restore: `(nominal, concept)`.
    extras: im::Vector<(CId, CId)>,
    budget: Budget,
    started: Instant,
    pub steps: u64,
    pub digest: u64,
}

impl Engine {
    pub fn new(store: Store, clauses: Arc<[CId]>, budget: Budget) -> Self {
        Engine {
            store,
            clauses,
            state: State::default(),
            stack: im::Vector::new(),
            extras: im::Vector::new(),
            budget,
            started: Instant::now(),
            steps: 0,
            digest: 0xcbf2_9ce4_8422_2325,
        }
    }

    pub fn restart_clock(&mut self) {
        self.started = Instant::now();
    }

    fn node(&self, x: NodeId) -> &Node {
        &self.state.nodes[x as usize]
    }

    fn node_mut(&mut self, x: NodeId) -> &mut Node {
        &mut self.state.nodes[x as usize]
    }

    fn live(&self, x: NodeId) -> bool {
        self.node(x).status == Status::Live
    }

    fn resolve(&self, mut x: NodeId) -> NodeId {
        while let Status::Merged(z) = self.node(x).status {
            x = z;
        }
        x
    }

    pub fn live_nodes(&self) -> usize {
        self.state.nodes.iter().filter(|n| n.status == Status::Live).count()
    }

    fn trace(&mut self, tag: u64, x: NodeId, c: CId) {
        for v in [tag, x as u64, c as u64] {
            self.digest ^= v;
            self.digest = self.digest.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn tick(&mut self) -> Result<(), ReasonerError> {
        self.steps += 1;
        if self.steps % 512 == 0 {
            if let Some(t) = self.budget.timeout {
                if self.started.elapsed() > t {
                    return Err(ReasonerError::Timeout(t.as_millis() as u64));
                }
            }
        }
        Ok(())
    }

    fn new_node(&mut self, kind: Kind, parent: Option<NodeId>) -> Result<NodeId, Stop> {
        if self.state.nodes.len() >= self.budget.max_nodes {
            return Err(Stop::Limit(ReasonerError::NodeBudget(self.budget.max_nodes)));
        }
        let id = self.state.nodes.len() as NodeId;
        self.state.nodes.push_back(Node {
            label: im::OrdMap::new(),
            hash: 0,
            kind,
            status: Status::Live,
            parent,
            neighbors: im::OrdMap::new(),
            lazies: im::OrdSet::new(),
        });
        let clauses = self.clauses.clone();
        for &c in clauses.iter() {
            self.add(id, c, Deps::none())?;
        }
        Ok(id)
    }

    pub fn new_root(&mut self) -> Result<NodeId, Stop> {
        self.new_node(Kind::Root, None)
    }

    /// The node carrying nominal `nom`, created on first use, with the
    /// dependencies of `nom` there (non-empty once merges were conditional).
    pub fn home(&mut self, nom: CId) -> Result<(NodeId, Deps), Stop> {
        if let Some(&h) = self.state.homes.get(&nom) {
            let x = self.resolve(h);
            let d = self.node(x).label.get(&nom).cloned().unwrap_or_default();
            return Ok((x, d));
        }
        let x = self.new_node(Kind::Named, None)?;
        self.state.homes.insert(nom, x);
        self.add(x, nom, Deps::none())?;
        Ok((x, Deps::none()))
    }

    /// Every nominal known to the store gets an element.
    pub fn ensure_homes(&mut self) -> Step {
        let noms: Vec<CId> = self.store.nominals().map(|(_, c)| c).collect();
        for c in noms {
            if !self.state.homes.contains_key(&c) {
                self.home(c)?;
            }
        }
        Ok(())
    }

    pub fn add_extra(&mut self, nom: CId, c: CId) -> Step {
        self.extras.push_back((nom, c));
        let (x, d) = self.home(nom)?;
        self.add(x, c, d)
    }

    pub fn add(&mut self, x: NodeId, c: CId, d: Deps) -> Step {
        let term = self.store.term(c).clone();
        if matches!(term, Term::Top) {
            return Ok(());
        }
        let node = self.node(x);
        if node.label.contains_key(&c) {
            return Ok(());
        }
        if matches!(term, Term::Bottom) {
            return Err(Stop::Clash(d));
        }
        if let Some(dn) = node.label.get(&self.store.neg(c)) {
            return Err(Stop::Clash(d.union(dn)));
        }
        let n = self.node_mut(x);
        n.label.insert(c, d);
        n.hash ^= mix(c);
        match term {
            Term::And(_) => {
                self.state.agenda.insert((P_AND, x, c));
            }
            Term::Forall(..) => {
                self.state.agenda.insert((P_FORALL, x, c));
            }
            Term::Or(_) => {
                self.state.agenda.insert((P_OR, x, c));
            }
            Term::Exists(..) => {
                self.state.pending.insert((x, c));
            }
            Term::Nominal(_) => {
                let home = self.state.homes.get(&c).map(|&h| self.resolve(h));
                if home != Some(x) {
                    self.state.agenda.insert((P_NOMINAL, x, c));
                }
                self.wake(x, c);
            }
            Term::Atom => self.wake(x, c),
            _ => {}
        }
        Ok(())
    }

    /// Re-examines lazily satisfied disjunctions that adding literal `c` at `x` may falsify.
    fn wake(&mut self, x: NodeId, c: CId) {
        if let Some(ws) = self.store.neg_watchers(c).cloned() {
            for o in ws {
                if self.node(x).lazies.contains(&o) {
                    self.node_mut(x).lazies.remove(&o);
                    self.state.agenda.insert((P_OR, x, o));
                }
            }
        }
        if let Some(ws) = self.store.forall_watchers(c).cloned() {
            let nbrs: Vec<NodeId> = self.node(x).neighbors.keys().copied().collect();
            for w in nbrs {
                for &o in ws.iter() {
                    if self.node(w).lazies.contains(&o) {
                        self.node_mut(w).lazies.remove(&o);
                        self.state.agenda.insert((P_OR, w, o));
                    }
                }
            }
        }
    }

    fn wake_all(&mut self, x: NodeId) {
        let lazies = std::mem::take(&mut self.node_mut(x).lazies);
        for o in lazies {
            self.state.agenda.insert((P_OR, x, o));
        }
    }

    pub fn add_edge(&mut self, x: NodeId, y: NodeId, r: RId, d: Deps) -> Step {
        if self.node(x).neighbors.get(&y).is_some_and(|m| m.contains_key(&r)) {
            return Ok(());
        }
        self.node_mut(x).neighbors.entry(y).or_default().insert(r, d.clone());
        self.node_mut(y).neighbors.entry(x).or_default().insert(inv(r), d.clone());
        for (from, to, p) in [(x, y, r), (y, x, inv(r))] {
            let foralls: Vec<(CId, Deps)> = self
                .node(from)
                .label
                .iter()
                .filter(|(c, _)| matches!(self.store.term(**c), Term::Forall(..)))
                .map(|(c, dc)| (*c, dc.clone()))
                .collect();
            for (c, dc) in foralls {
                self.forall_over(c, &dc, to, p, &d)?;
            }
        }
        self.wake_all(x);
        self.wake_all(y);
        Ok(())
    }

    /// Applies `c = ∀S.f` (held with deps `dc`) across one edge of role `p` to `y`.
    fn forall_over(&mut self, c: CId, dc: &Deps, y: NodeId, p: RId, de: &Deps) -> Step {
        let Term::Forall(s, f) = *self.store.term(c) else { unreachable!() };
        if !self.store.roles.is_sub(p, s) {
            return Ok(());
        }
        let d = dc.union(de);
        self.add(y, f, d.clone())?;
        let variants: Vec<(RId, CId)> = self.store.trans_variants(c).to_vec();
        for (t, ct) in variants {
            if self.store.roles.is_sub(p, t) {
                self.add(y, ct, d.clone())?;
            }
        }
        Ok(())
    }

    fn process(&mut self, (prio, x, c): (u8, NodeId, CId)) -> Step {
        if !self.live(x) {
            return Ok(());
        }
        let Some(d) = self.node(x).label.get(&c).cloned() else { return Ok(()) };
        self.trace(prio as u64, x, c);
        match self.store.term(c).clone() {
            Term::And(cs) => {
                for &k in cs.iter() {
                    self.add(x, k, d.clone())?;
                }
                Ok(())
            }
            Term::Forall(..) => {
                let nbrs = self.node(x).neighbors.clone();
                for (y, roles) in nbrs {
                    for (p, de) in roles {
                        if !self.live(x) {
                            return Ok(());
                        }
                        self.forall_over(c, &d, y, p, &de)?;
                    }
                }
                Ok(())
            }
            Term::Or(ds) => self.process_or(x, c, &ds, d),
            Term::Nominal(_) => self.process_nominal(x, c, d),
            _ => Ok(()),
        }
    }

    fn eval_disjunct(&self, x: NodeId, k: CId) -> Disjunct {
        let label = &self.node(x).label;
        match self.store.term(k) {
            Term::Top => return Disjunct::True,
            Term::Bottom => return Disjunct::Closed(Deps::none()),
            _ => {}
        }
        if label.contains_key(&k) {
            return Disjunct::True;
        }
        if let Some(dn) = label.get(&self.store.neg(k)) {
            return Disjunct::Closed(dn.clone());
        }
        match *self.store.term(k) {
            Term::Neg(_) => Disjunct::Lazy,
            Term::Forall(s, f) => {
                let nf = self.store.neg(f);
                let f_literal = matches!(self.store.term(f), Term::Neg(_) | Term::Top);
                let mut holds = self.store.trans_variants(k).is_empty();
                for (y, roles) in self.node(x).neighbors.iter() {
                    for (p, de) in roles.iter() {
                        if !self.store.roles.is_sub(*p, s) {
                            continue;
                        }
                        let ly = &self.node(*y).label;
                        if let Some(dn) = ly.get(&nf) {
                            return Disjunct::Closed(dn.union(de));
                        }
                        if !f_literal && !ly.contains_key(&f) {
                            holds = false;
                        }
                    }
                }
                if holds {
                    Disjunct::Lazy
                } else {
                    Disjunct::Open
                }
            }
            _ => Disjunct::Open,
        }
    }

    fn process_or(&mut self, x: NodeId, c: CId, ds: &[CId], d: Deps) -> Step {
        let mut base = d;
        let mut open = Vec::new();
        let mut lazy = false;
        for &k in ds {
            match self.eval_disjunct(x, k) {
                Disjunct::True => return Ok(()),
                Disjunct::Lazy => lazy = true,
                Disjunct::Closed(dk) => base = base.union(&dk),
                Disjunct::Open => open.push(k),
            }
        }
        if lazy {
            self.node_mut(x).lazies.insert(c);
            return Ok(());
        }
        match open.len() {
            0 => Err(Stop::Clash(base)),
            1 => self.add(x, open[0], base),
            _ => {
                open.sort_by_key(|&k| (self.store.generates(k), k));
                let id = self.stack.len() as u32;
                self.trace(9, x, c);
                self.stack.push_back(BranchPoint {
                    snapshot: self.state.clone(),
                    node: x,
                    alts: open.clone().into(),
                    next: 0,
                    base: base.clone(),
                    acc: Deps::none(),
                });
                self.add(x, open[0], base.with(id))
            }
        }
    }

    fn process_nominal(&mut self, x: NodeId, c: CId, d: Deps) -> Step {
        if !self.state.homes.contains_key(&c) && self.node(x).kind != Kind::Blockable {
            self.state.homes.insert(c, x);
            return Ok(());
        }
        let (home, dh) = self.home(c)?;
        if home == x {
            return Ok(());
        }
        let d = d.union(&dh);
        let (from, into) = match (self.node(x).kind, self.node(home).kind) {
            (Kind::Blockable, _) => (x, home),
            (_, Kind::Blockable) => (home, x),
            _ if x < home => (home, x),
            _ => (x, home),
        };
        self.merge(from, into, d)
    }

    fn merge(&mut self, from: NodeId, into: NodeId, m: Deps) -> Step {
        self.trace(7, from, into);
        let node = self.node(from).clone();
        {
            let n = self.node_mut(from);
            n.status = Status::Merged(into);
            n.neighbors = im::OrdMap::new();
            n.lazies = im::OrdSet::new();
        }
        let from_blockable = node.kind == Kind::Blockable;
        let mut moved = Vec::new();
        for (w, roles) in node.neighbors.iter() {
            let w = *w;
            if w != from {
                let wn = self.node(w);
                if from_blockable && wn.kind == Kind::Blockable && wn.parent == Some(from) {
                    self.prune(w);
                    continue;
                }
                self.node_mut(w).neighbors.remove(&from);
                if !from_blockable && self.node(w).parent == Some(from) {
                    self.node_mut(w).parent = Some(into);
                }
            }
            let target = if w == from { into } else { w };
            for (p, d) in roles.iter() {
                moved.push((target, *p, d.union(&m)));
            }
        }
        for (c, d) in node.label.iter() {
            self.add(into, *c, d.union(&m))?;
        }
        for (w, p, d) in moved {
            if self.live(w) {
                self.add_edge(into, w, p, d)?;
            }
        }
        Ok(())
    }

    fn prune(&mut self, w: NodeId) {
        if !self.live(w) {
            return;
        }
        let node = self.node(w).clone();
        {
            let n = self.node_mut(w);
            n.status = Status::Pruned;
            n.neighbors = im::OrdMap::new();
            n.lazies = im::OrdSet::new();
        }
        for v in node.neighbors.keys().copied() {
            if v == w {
                continue;
            }
            let vn = self.node(v);
            if vn.kind == Kind::Blockable && vn.parent == Some(w) {
                self.prune(v);
                continue;
            }
            if !self.live(v) {
                continue;
            }
            self.node_mut(v).neighbors.remove(&w);
            let exists: Vec<CId> = self
                .node(v)
                .label
                .keys()
                .copied()
                .filter(|c| matches!(self.store.term(*c), Term::Exists(..)))
                .collect();
            for c in exists {
                self.state.pending.insert((v, c));
            }
        }
    }

    fn labels_equal(&self, a: NodeId, b: NodeId) -> bool {
        let (la, lb) = (&self.node(a).label, &self.node(b).label);
        la.len() == lb.len() && la.keys().eq(lb.keys())
    }

    /// Equality anywhere blocking over live blockable nodes, in creation
    /// order. Without number restrictions a blocked node's edges can be
    /// redirected to its blocker; the ∀-rules keep running on blocked nodes,
    /// so constraints across the redirected edge still hold both ways.
    fn blocking(&self) -> Vec<bool> {
        let n = self.state.nodes.len();
        let mut blocked = vec![false; n];
        let mut seen: HashMap<u64, Vec<NodeId>> = HashMap::new();
        for (i, node) in self.state.nodes.iter().enumerate() {
            if node.status != Status::Live || node.kind != Kind::Blockable {
                continue;
            }
            let x = i as NodeId;
            let Some(p) = node.parent else { continue };
            if blocked[p as usize] {
                blocked[i] = true;
                continue;
            }
            let cands = seen.entry(node.hash).or_default();
            if cands.iter().any(|&y| self.labels_equal(x, y)) {
                blocked[i] = true;
            } else {
                cands.push(x);
            }
        }
        blocked
    }

    fn exists_satisfied(&self, x: NodeId, c: CId) -> bool {
        let Term::Exists(r, f) = *self.store.term(c) else { unreachable!() };
        let top = matches!(self.store.term(f), Term::Top);
        self.node(x).neighbors.iter().any(|(y, roles)| {
            roles.keys().any(|&p| self.store.roles.is_sub(p, r))
                && (top || self.node(*y).label.contains_key(&f))
        })
    }

    /// Expands every unblocked, unsatisfied existential. `Ok(false)` means the
    /// graph is complete.
    fn expand(&mut self) -> Result<bool, Stop> {
        let blocked = self.blocking();
        let items: Vec<(NodeId, CId)> = self.state.pending.iter().copied().collect();
        let mut todo = Vec::new();
        for (x, c) in items {
            if !self.live(x) || !self.node(x).label.contains_key(&c) {
                self.state.pending.remove(&(x, c));
            } else if blocked[x as usize] {
                continue;
            } else if self.exists_satisfied(x, c) {
                self.state.pending.remove(&(x, c));
            } else {
                todo.push((x, c));
            }
        }
        if todo.is_empty() {
            return Ok(false);
        }
        for (x, c) in todo {
            if !self.live(x) {
                continue;
            }
            self.state.pending.remove(&(x, c));
            if self.exists_satisfied(x, c) {
                continue;
            }
            self.trace(8, x, c);
            let Term::Exists(r, f) = *self.store.term(c) else { unreachable!() };
            let d = self.node(x).label[&c].clone();
            let y = self.new_node(Kind::Blockable, Some(x))?;
            self.add(y, f, d.clone())?;
            self.add_edge(x, y, r, d)?;
        }
        Ok(true)
    }

    fn resume(&mut self, bp: &BranchPoint, id: u32, last: bool) -> Step {
        self.ensure_homes()?;
        let extras = self.extras.clone();
        for (nom, c) in extras {
            let (x, d) = self.home(nom)?;
            self.add(x, c, d)?;
        }
        for j in 0..bp.next {
            self.add(bp.node, self.store.neg(bp.alts[j]), bp.acc.clone())?;
        }
        let deps = if last { bp.base.union(&bp.acc) } else { bp.base.with(id) };
        self.add(bp.node, bp.alts[bp.next], deps)
    }

    /// Jumps back to the latest branch point the clash depends on and tries
    /// its next alternative. `Ok(false)`: no alternatives left.
    fn backtrack(&mut self, clash: Deps) -> Result<bool, ReasonerError> {
        let mut k = clash;
        loop {
            let Some(m) = k.max() else { return Ok(false) };
            debug_assert!((m as usize) < self.stack.len());
            self.stack.truncate(m as usize + 1);
            let mut bp = self.stack[m as usize].clone();
            bp.acc = bp.acc.union(&k.without(m));
            bp.next += 1;
            self.state = bp.snapshot.clone();
            let last = bp.next + 1 == bp.alts.len();
            if last {
                self.stack.pop_back();
            } else {
                self.stack[m as usize] = bp.clone();
            }
            self.trace(10, bp.node, m);
            match self.resume(&bp, m, last) {
                Ok(()) => return Ok(true),
                Err(Stop::Clash(k2)) => k = k2,
                Err(Stop::Limit(e)) => return Err(e),
            }
        }
    }

    /// Routes the outcome of a setup step: clashes backtrack, limits surface.
    pub fn settle(&mut self, r: Step) -> Result<bool, ReasonerError> {
        match r {
            Ok(()) => Ok(true),
            Err(Stop::Clash(k)) => self.backtrack(k),
            Err(Stop::Limit(e)) => Err(e),
        }
    }

    /// Runs to a complete clash-free graph (`true`) or exhausts all branches (`false`).
    pub fn run(&mut self) -> Result<bool, ReasonerError> {
        loop {
            while let Some(item) = self.state.agenda.get_min().copied() {
                self.state.agenda.remove(&item);
                self.tick()?;
                let r = self.process(item);
                if !self.settle(r)? {
                    return Ok(false);
                }
            }
            match self.expand() {
                Ok(false) => return Ok(true),
                Ok(true) => {}
                Err(stop) => {
                    if !self.settle(Err(stop))? {
                        return Ok(false);
                    }
                }
            }
        }
    }
}
