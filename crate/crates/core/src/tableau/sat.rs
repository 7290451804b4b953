//! Small CDCL solver: two watched literals, first-UIP clause learning,
//! activity-ordered decisions. Sized for the bounded model checker, whose
//! instances have a few thousand variables at most.

use std::ops::Not;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn negative(self) -> bool {
        self.0 & 1 == 1
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Default)]
pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    /// `watches[l]`: clauses watching `¬l`, i.e. to revisit once `l` is true.
    watches: Vec<Vec<usize>>,
    units: Vec<Lit>,
    empty: bool,
    /// 0 unassigned, 1 true, -1 false, per variable.
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    activity: Vec<f64>,
    bump: f64,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
}

impl Solver {
    pub fn new() -> Self {
        Solver { bump: 1.0, ..Solver::default() }
    }

    pub fn new_lit(&mut self) -> Lit {
        let v = self.assign.len() as u32;
        self.assign.push(0);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        Lit(v << 1)
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        match c.len() {
            0 => self.empty = true,
            1 => self.units.push(c[0]),
            _ => {
                self.attach(c);
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        self.watches[(!c[0]).code()].push(i);
        self.watches[(!c[1]).code()].push(i);
        self.clauses.push(c);
        i
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assign[l.var()];
        if l.negative() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn set(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assign[v] = if l.negative() { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let l = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = !l;
            let mut ws = std::mem::take(&mut self.watches[l.code()]);
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let ci = ws[i];
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                let first_val = self.value(first);
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let len = self.clauses[ci].len();
                let mut moved = false;
                for k in 2..len {
                    let cand = self.clauses[ci][k];
                    if self.value(cand) != -1 {
                        self.clauses[ci].swap(1, k);
                        self.watches[(!cand).code()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                if first_val == -1 {
                    conflict = Some(ci);
                    break;
                }
                self.set(first, Some(ci));
            }
            let rest = std::mem::take(&mut self.watches[l.code()]);
            ws.extend(rest);
            self.watches[l.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.bump;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
        }
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first)
    /// and the level to jump back to.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, u32) {
        let mut seen = vec![false; self.assign.len()];
        let mut learnt = vec![Lit(0)];
        let mut counter = 0;
        let mut clause = conflict;
        let mut skip_first = false;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        let p = loop {
            let lits = self.clauses[clause].clone();
            for &q in lits.iter().skip(skip_first as usize) {
                let v = q.var();
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            let p = loop {
                idx -= 1;
                if seen[self.trail[idx].var()] {
                    break self.trail[idx];
                }
            };
            seen[p.var()] = false;
            counter -= 1;
            if counter == 0 {
                break p;
            }
            clause = self.reason[p.var()].expect("implied literal has a reason");
            skip_first = true;
        };
        learnt[0] = !p;
        self.bump *= 1.05;
        let mut back = 0;
        if learnt.len() > 1 {
            let (k, _) = learnt.iter().enumerate().skip(1).max_by_key(|(_, l)| self.level[l.var()]).unwrap();
            learnt.swap(1, k);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let len = self.trail_lim[level as usize];
        for l in self.trail.drain(len..) {
            self.assign[l.var()] = 0;
            self.reason[l.var()] = None;
        }
        self.trail_lim.truncate(level as usize);
        self.qhead = len;
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.assign.len() {
            if self.assign[v] == 0 && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best
    }

    pub fn solve(&mut self) -> bool {
        if self.empty {
            return false;
        }
        self.cancel_until(0);
        for u in self.units.clone() {
            match self.value(u) {
                1 => {}
                -1 => return false,
                _ => self.set(u, None),
            }
        }
        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    return false;
                }
                let (learnt, back) = self.analyze(conflict);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.set(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let ci = self.attach(learnt);
                    self.set(asserting, Some(ci));
                }
                continue;
            }
            let Some(v) = self.pick() else { return true };
            self.trail_lim.push(self.trail.len());
            self.set(!Lit((v as u32) << 1), None);
        }
    }

    pub fn value_of(&self, l: Lit) -> bool {
        self.value(l) == 1
    }
}
