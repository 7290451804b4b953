//! Deterministic university-flavoured ontology generator.
//!
//! Every unit (a department with its university hub) is laid out from one
//! template drawn from the seed, so units differ only in their names. Units
//! are strung together by chains of hub individuals. Trigger-role assertions
//! always form a forest; cycles appear only on the other roles.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dl::{ABox, Concept, Name, Ontology, Role, TBox};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of departments, each with its own university hub.
    pub scale: usize,
    /// Undergraduates per department; other populations scale with it.
    pub fanout: usize,
    /// Chance that a non-trigger assertion closing a cycle is kept.
    pub cycle_rate: f64,
    /// Fraction of the roles given a universally quantified axiom.
    pub trigger_fraction: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 42, scale: 1, fanout: 120, cycle_rate: 0.1, trigger_fraction: 5.0 / 12.0 }
    }
}

/// Hub individuals between consecutive universities.
pub const HUB_CHAIN: usize = 8;

/// Roles in the order their axioms are switched on by `trigger_fraction`.
pub const ROLES: [&str; 12] = [
    "takesCourse",
    "teacherOf",
    "advisor",
    "headOf",
    "teachingAssistantOf",
    "worksFor",
    "memberOf",
    "subOrganizationOf",
    "publicationAuthor",
    "friendOf",
    "attends",
    "linkedTo",
];

fn a(n: &str) -> Concept {
    Concept::atomic(n)
}

fn ex(r: &str, c: Concept) -> Concept {
    Concept::exists(Role::named(r), c)
}

fn role_axioms(t: &mut TBox, role: &str) {
    match role {
        "takesCourse" => {
            t.add_equivalence(a("Student"), Concept::and([a("Person"), ex("takesCourse", a("Course"))]));
            t.add_gci(ex("takesCourse", a("GraduateCourse")), a("GraduateStudent"));
        }
        "teacherOf" => t.add_gci(ex("teacherOf", a("Course")), a("Faculty")),
        "advisor" => t.add_equivalence(
            a("GroupLeader"),
            Concept::and([a("Professor"), Concept::exists(Role::named("advisor").inv(), a("GraduateStudent"))]),
        ),
        "headOf" => t.add_gci(ex("headOf", a("Department")), a("Chair")),
        "teachingAssistantOf" => t.add_gci(ex("teachingAssistantOf", a("Course")), a("TeachingAssistant")),
        "worksFor" => t.add_gci(ex("worksFor", a("Organization")), a("Employee")),
        "memberOf" => t.add_gci(ex("memberOf", a("Organization")), a("Member")),
        "subOrganizationOf" => t.add_gci(ex("subOrganizationOf", a("University")), a("Department")),
        "publicationAuthor" => t.add_gci(ex("publicationAuthor", a("Professor")), a("ResearchPaper")),
        "friendOf" => t.add_gci(ex("friendOf", a("Student")), a("Person")),
        "attends" => t.add_gci(ex("attends", a("Event")), a("Participant")),
        "linkedTo" => t.add_gci(ex("linkedTo", a("University")), a("University")),
        _ => unreachable!("unknown generator role {role}"),
    }
}

pub fn default_tbox(trigger_fraction: f64) -> TBox {
    let mut t = TBox::new();
    for (sub, sup) in [
        ("GraduateStudent", "Student"),
        ("UndergraduateStudent", "Student"),
        ("Faculty", "Person"),
        ("Professor", "Faculty"),
        ("FullProfessor", "Professor"),
        ("AssociateProfessor", "Professor"),
        ("AssistantProfessor", "Professor"),
        ("Lecturer", "Faculty"),
        ("Chair", "Professor"),
        ("GraduateCourse", "Course"),
        ("Department", "Organization"),
        ("University", "Organization"),
    ] {
        t.add_gci(a(sub), a(sup));
    }
    t.add_gci(Concept::and([a("Course"), a("Person")]), Concept::Bottom);
    t.add_gci(a("Faculty"), ex("worksFor", a("Organization")));
    t.add_gci(a("Professor"), Concept::or([a("FullProfessor"), a("AssociateProfessor"), a("AssistantProfessor")]));
    t.add_role_inclusion(Role::named("headOf"), Role::named("worksFor"));
    t.add_transitive("subOrganizationOf");
    let k = ((trigger_fraction.clamp(0.0, 1.0) * ROLES.len() as f64).round() as usize).min(ROLES.len());
    for r in &ROLES[..k] {
        role_axioms(&mut t, r);
    }
    t
}

/// Individuals of one unit, named by kind and index. The unit suffix is
/// appended when the template is instantiated.
#[derive(Clone, Debug)]
struct Template {
    faculty: Vec<(String, &'static str)>,
    courses: Vec<(String, &'static str)>,
    grads: Vec<String>,
    undergrads: Vec<String>,
    /// Trigger-role assertions between template names (and `Dept`).
    edges: Vec<(&'static str, String, String)>,
}

struct Forest {
    parent: BTreeMap<String, String>,
}

impl Forest {
    fn new() -> Self {
        Forest { parent: BTreeMap::new() }
    }

    fn find(&mut self, x: &str) -> String {
        let mut cur = x.to_string();
        let mut path = Vec::new();
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            path.push(cur.clone());
            cur = p.clone();
        }
        for n in path {
            self.parent.insert(n, cur.clone());
        }
        cur
    }

    /// Joins the trees of `x` and `y`; false if they were already joined.
    fn union(&mut self, x: &str, y: &str) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent.insert(rx, ry);
        true
    }
}

fn template(rng: &mut ChaCha8Rng, fanout: usize) -> Template {
    let n_faculty = (fanout / 6).max(3);
    let kinds = ["FullProfessor", "AssociateProfessor", "AssistantProfessor", "Lecturer"];
    let faculty: Vec<(String, &'static str)> = (0..n_faculty)
        .map(|i| {
            let kind = if i == 0 { "FullProfessor" } else { kinds[rng.gen_range(0..kinds.len())] };
            (format!("Faculty{i}"), kind)
        })
        .collect();
    let mut courses = Vec::new();
    let mut edges = Vec::new();
    let mut forest = Forest::new();
    let mut link = |edges: &mut Vec<(&'static str, String, String)>, r: &'static str, s: &str, o: &str| {
        if forest.union(s, o) {
            edges.push((r, s.to_string(), o.to_string()));
        }
    };
    link(&mut edges, "headOf", "Faculty0", "Dept");
    for (f, _) in &faculty {
        for _ in 0..rng.gen_range(1..=2) {
            let c = format!("Course{}", courses.len());
            let kind = if rng.gen_bool(0.3) { "GraduateCourse" } else { "Course" };
            link(&mut edges, "teacherOf", f, &c);
            courses.push((c, kind));
        }
    }
    let professors: Vec<&String> =
        faculty.iter().filter(|(_, k)| *k != "Lecturer").map(|(f, _)| f).collect();
    let grads: Vec<String> = (0..(fanout / 4).max(2)).map(|i| format!("GradStudent{i}")).collect();
    let undergrads: Vec<String> = (0..fanout).map(|i| format!("Undergrad{i}")).collect();
    for g in &grads {
        let p = professors.choose(rng).unwrap();
        link(&mut edges, "advisor", g, p);
        let c = &courses.choose(rng).unwrap().0;
        link(&mut edges, "takesCourse", g, c);
        if rng.gen_bool(0.3) {
            let c = &courses.choose(rng).unwrap().0;
            link(&mut edges, "teachingAssistantOf", g, c);
        }
    }
    for u in &undergrads {
        for _ in 0..rng.gen_range(1..=3) {
            let c = &courses.choose(rng).unwrap().0;
            link(&mut edges, "takesCourse", u, c);
        }
        if rng.gen_bool(0.1) {
            let p = professors.choose(rng).unwrap();
            link(&mut edges, "advisor", u, p);
        }
    }
    Template { faculty, courses, grads, undergrads, edges }
}

/// The individual holding the template name `x` in unit `u`.
pub fn unit_name(x: &str, u: usize) -> Name {
    Name::from(format!("{x}_{u}"))
}

pub fn generate(cfg: &GenConfig) -> Ontology {
    assert!(cfg.scale >= 1, "scale must be at least 1");
    let tbox = default_tbox(cfg.trigger_fraction);
    let mut trng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tpl = template(&mut trng, cfg.fanout);
    let mut abox = ABox::new();
    let mut forest = Forest::new();
    for u in 0..cfg.scale {
        let n = |x: &str| unit_name(x, u);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
        abox.assert_concept(a("Department"), n("Dept"));
        abox.assert_concept(a("University"), n("Univ"));
        for (f, k) in &tpl.faculty {
            abox.assert_concept(a(k), n(f));
        }
        for (c, k) in &tpl.courses {
            abox.assert_concept(a(k), n(c));
        }
        for g in &tpl.grads {
            abox.assert_concept(a("GraduateStudent"), n(g));
        }
        for s in &tpl.undergrads {
            abox.assert_concept(a("UndergraduateStudent"), n(s));
        }
        for (r, s, o) in &tpl.edges {
            forest.union(n(s).as_str(), n(o).as_str());
            abox.assert_role(*r, n(s), n(o));
        }

        // Non-trigger wiring. The stream restarts per unit, and the unit's only
        // link to the rest is through its university, so every unit is wired alike.
        let mut wire = |abox: &mut ABox, rng: &mut ChaCha8Rng, r: &str, s: Name, o: Name| {
            if forest.union(s.as_str(), o.as_str()) || rng.gen_bool(cfg.cycle_rate) {
                abox.assert_role(r, s, o);
            }
        };
        wire(&mut abox, &mut rng, "subOrganizationOf", n("Dept"), n("Univ"));
        // Hub chain from the previous university to this one.
        for i in 0..HUB_CHAIN {
            let hub = n(&format!("Hub{i}"));
            abox.assert_concept(a("Organization"), hub.clone());
            let prev = match (i, u) {
                (0, 0) => continue,
                (0, _) => unit_name("Univ", u - 1),
                _ => n(&format!("Hub{}", i - 1)),
            };
            wire(&mut abox, &mut rng, "linkedTo", prev, hub);
        }
        wire(&mut abox, &mut rng, "linkedTo", n(&format!("Hub{}", HUB_CHAIN - 1)), n("Univ"));
        for (f, _) in &tpl.faculty {
            wire(&mut abox, &mut rng, "worksFor", n(f), n("Dept"));
        }
        let students: Vec<&String> = tpl.grads.iter().chain(&tpl.undergrads).collect();
        for s in &students {
            wire(&mut abox, &mut rng, "memberOf", n(s), n("Dept"));
        }
        for i in 0..cfg.fanout / 4 {
            let p = n(&format!("Paper{i}"));
            abox.assert_concept(a("Publication"), p.clone());
            let (f, _) = tpl.faculty.choose(&mut rng).unwrap();
            wire(&mut abox, &mut rng, "publicationAuthor", p.clone(), n(f));
            let (f, _) = tpl.faculty.choose(&mut rng).unwrap();
            wire(&mut abox, &mut rng, "publicationAuthor", p, n(f));
        }
        for i in 0..(cfg.fanout / 40).max(1) {
            let e = n(&format!("Event{i}"));
            abox.assert_concept(a("Event"), e.clone());
            wire(&mut abox, &mut rng, "linkedTo", e.clone(), n("Univ"));
            for s in students.choose_multiple(&mut rng, 5) {
                wire(&mut abox, &mut rng, "attends", n(s), e.clone());
            }
        }
        for _ in 0..cfg.fanout / 2 {
            let x = students.choose(&mut rng).unwrap();
            let y = students.choose(&mut rng).unwrap();
            if x != y {
                wire(&mut abox, &mut rng, "friendOf", n(x), n(y));
            }
        }
    }
    Ontology::new(tbox, abox)
}

/// Five fixed queries over the generator vocabulary, as functional syntax.
pub fn suite_queries() -> Vec<String> {
    vec![
        "Student".into(),
        "ObjectIntersectionOf(Faculty ObjectSomeValuesFrom(teacherOf GraduateCourse))".into(),
        "ObjectSomeValuesFrom(advisor FullProfessor)".into(),
        "ObjectSomeValuesFrom(takesCourse ObjectSomeValuesFrom(ObjectInverseOf(teacherOf) GroupLeader))".into(),
        format!("ObjectSomeValuesFrom(advisor ObjectOneOf({}))", unit_name("Faculty0", 0)),
    ]
}
