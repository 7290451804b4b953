#![allow(dead_code)]

use msct_core::dl::{ABox, Concept, Role, TBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ATOMS: [&str; 3] = ["A", "B", "C"];
pub const ROLES: [&str; 2] = ["R", "S"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_role(r: &mut impl Rng) -> Role {
    let name = ROLES[r.gen_range(0..ROLES.len())];
    if r.gen_bool(0.3) {
        Role::inverse_of(name)
    } else {
        Role::named(name)
    }
}

/// Random concept over three atoms, two roles and the nominal `o`.
pub fn random_concept(r: &mut impl Rng, depth: usize) -> Concept {
    let leaf = depth == 0 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..10) {
            0 => Concept::Top,
            1 => Concept::nominal("o"),
            2 | 3 => Concept::not(Concept::atomic(ATOMS[r.gen_range(0..ATOMS.len())])),
            _ => Concept::atomic(ATOMS[r.gen_range(0..ATOMS.len())]),
        };
    }
    match r.gen_range(0..6) {
        0 => Concept::not(random_concept(r, depth - 1)),
        1 => Concept::and([random_concept(r, depth - 1), random_concept(r, depth - 1)]),
        2 => Concept::or([random_concept(r, depth - 1), random_concept(r, depth - 1)]),
        3 | 4 => Concept::exists(random_role(r), random_concept(r, depth - 1)),
        _ => Concept::forall(random_role(r), random_concept(r, depth - 1)),
    }
}

/// Conjunction of a few random parts; unsatisfiable often enough to matter.
pub fn random_query(r: &mut impl Rng) -> Concept {
    let n = r.gen_range(2..=4);
    Concept::and((0..n).map(|_| random_concept(r, 2)).collect::<Vec<_>>())
}

pub fn random_tbox(r: &mut impl Rng) -> TBox {
    let mut t = TBox::new();
    for _ in 0..r.gen_range(0..=4) {
        let lhs = random_concept(r, 2);
        let rhs = random_concept(r, 2);
        t.add_gci(lhs, rhs);
    }
    if r.gen_bool(0.3) {
        t.add_transitive(ROLES[r.gen_range(0..ROLES.len())]);
    }
    if r.gen_bool(0.3) {
        let sub = random_role(r);
        let sup = random_role(r);
        if sub.name() != sup.name() {
            t.add_role_inclusion(sub, sup);
        }
    }
    t
}

pub fn random_abox(r: &mut impl Rng) -> ABox {
    let inds = ["a", "b"];
    let mut ab = ABox::new();
    for _ in 0..r.gen_range(1..=3) {
        let c = random_concept(r, 1);
        ab.assert_concept(c, inds[r.gen_range(0..2)]);
    }
    for _ in 0..r.gen_range(0..=2) {
        ab.assert_role(ROLES[r.gen_range(0..ROLES.len())], inds[r.gen_range(0..2)], inds[r.gen_range(0..2)]);
    }
    ab
}
