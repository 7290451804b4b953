use msct_core::dl::{ABox, Concept, Name, Ontology, Role, TBox};
use msct_core::syntax::{parse_concept, parse_ontology};
use msct_core::tableau::{
    bounded_model_check, is_consistent, is_instance, is_satisfiable, is_subsumed, Budget, Reasoner, ReasonerError,
};

fn c(s: &str) -> Concept {
    parse_concept(s).unwrap()
}

fn tbox(s: &str) -> TBox {
    parse_ontology(s).unwrap().tbox
}

fn onto(s: &str) -> Ontology {
    parse_ontology(s).unwrap()
}

#[test]
fn contradiction_is_unsat() {
    assert!(!is_satisfiable(&TBox::new(), &c("ObjectIntersectionOf(A ObjectComplementOf(A))")).unwrap());
    assert!(!is_satisfiable(&TBox::new(), &Concept::Bottom).unwrap());
    assert!(is_satisfiable(&TBox::new(), &Concept::Top).unwrap());
}

#[test]
fn existential_axiom_forces_rhs() {
    let t = tbox("SubClassOf(ObjectSomeValuesFrom(R C) D)");
    let q = c("ObjectIntersectionOf(ObjectSomeValuesFrom(R C) ObjectComplementOf(D))");
    assert!(!is_satisfiable(&t, &q).unwrap());
    // Through the inverse: C ⊑ ∀R⁻.D says the same thing.
    let t2 = tbox("SubClassOf(C ObjectAllValuesFrom(ObjectInverseOf(R) D))");
    assert!(!is_satisfiable(&t2, &q).unwrap());
}

#[test]
fn transitive_cycle_is_blocked() {
    let t = tbox("SubClassOf(A ObjectSomeValuesFrom(R A))\nTransitiveObjectProperty(R)");
    let r = Reasoner::new(&t, Budget::default()).check_satisfiable(&c("A")).unwrap();
    assert!(r.satisfiable);
    assert!(r.nodes < 10);
    let m = bounded_model_check(&t, None, Some(&c("A")), 1).unwrap();
    assert_eq!(m.domain_size, 1);
}

#[test]
fn curated_subsumptions() {
    let empty = TBox::new();
    let yes = [
        ("C", "Top"),
        ("Bottom", "A"),
        ("ObjectIntersectionOf(A B)", "A"),
        ("A", "ObjectUnionOf(A B)"),
        ("ObjectIntersectionOf(ObjectOneOf(x) ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectOneOf(x))))",
         "ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectSomeValuesFrom(R1 Top)))"),
        ("ObjectSomeValuesFrom(R ObjectAllValuesFrom(ObjectInverseOf(R) A))", "A"),
        ("ObjectIntersectionOf(ObjectSomeValuesFrom(R A) ObjectAllValuesFrom(R B))", "ObjectSomeValuesFrom(R ObjectIntersectionOf(A B))"),
    ];
    for (sub, sup) in yes {
        assert!(is_subsumed(&empty, &c(sub), &c(sup)).unwrap(), "{sub} ⊑ {sup}");
    }
    let no = [
        ("Top", "A"),
        ("A", "B"),
        ("ObjectUnionOf(A B)", "A"),
        ("ObjectIntersectionOf(ObjectSomeValuesFrom(R1 Top) ObjectSomeValuesFrom(R2 Top))",
         "ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectSomeValuesFrom(R1 Top)))"),
        ("ObjectSomeValuesFrom(R A)", "ObjectAllValuesFrom(R A)"),
    ];
    for (sub, sup) in no {
        assert!(!is_subsumed(&empty, &c(sub), &c(sup)).unwrap(), "{sub} ⋢ {sup}");
    }
}

#[test]
fn role_hierarchy_and_transitivity() {
    let t = tbox("SubObjectPropertyOf(R S)\nTransitiveObjectProperty(S)");
    assert!(is_subsumed(&t, &c("ObjectSomeValuesFrom(R A)"), &c("ObjectSomeValuesFrom(S A)")).unwrap());
    assert!(!is_subsumed(&t, &c("ObjectSomeValuesFrom(S A)"), &c("ObjectSomeValuesFrom(R A)")).unwrap());
    assert!(is_subsumed(
        &t,
        &c("ObjectSomeValuesFrom(R ObjectSomeValuesFrom(R A))"),
        &c("ObjectSomeValuesFrom(S A)")
    )
    .unwrap());
    assert!(is_subsumed(
        &t,
        &c("ObjectSomeValuesFrom(ObjectInverseOf(R) A)"),
        &c("ObjectSomeValuesFrom(ObjectInverseOf(S) A)")
    )
    .unwrap());
    // ∀₊: ∀S.B propagates along S-chains.
    let q = c("ObjectIntersectionOf(ObjectAllValuesFrom(S B) ObjectSomeValuesFrom(S ObjectSomeValuesFrom(R ObjectComplementOf(B))))");
    assert!(!is_satisfiable(&t, &q).unwrap());
}

#[test]
fn tbox_with_disjunction_needs_backtracking() {
    let t = tbox(
        "SubClassOf(A ObjectUnionOf(B C))\nSubClassOf(B D)\nSubClassOf(C D)\nSubClassOf(ObjectIntersectionOf(B E) Bottom)",
    );
    assert!(is_subsumed(&t, &c("A"), &c("D")).unwrap());
    assert!(is_subsumed(&t, &c("ObjectIntersectionOf(A E)"), &c("C")).unwrap());
    assert!(!is_subsumed(&t, &c("A"), &c("C")).unwrap());
}

#[test]
fn nominals_merge() {
    let empty = TBox::new();
    let q = c("ObjectIntersectionOf(ObjectSomeValuesFrom(R ObjectIntersectionOf(ObjectOneOf(o) A)) ObjectSomeValuesFrom(S ObjectIntersectionOf(ObjectOneOf(o) ObjectComplementOf(A))))");
    assert!(!is_satisfiable(&empty, &q).unwrap());
    let q2 = c("ObjectIntersectionOf(ObjectOneOf(o) ObjectSomeValuesFrom(R ObjectComplementOf(ObjectOneOf(o))))");
    assert!(is_satisfiable(&empty, &q2).unwrap());
}

#[test]
fn consistency_examples() {
    assert!(is_consistent(&Ontology::empty()).unwrap());
    let bad = onto(
        "SubClassOf(ObjectSomeValuesFrom(R C) D)\nClassAssertion(ObjectComplementOf(D) a)\nObjectPropertyAssertion(R a b)\nClassAssertion(C b)",
    );
    assert!(!is_consistent(&bad).unwrap());
    let good = onto(
        "SubClassOf(ObjectSomeValuesFrom(R C) D)\nClassAssertion(ObjectComplementOf(D) a)\nObjectPropertyAssertion(R a b)\nClassAssertion(ObjectComplementOf(C) b)",
    );
    assert!(is_consistent(&good).unwrap());
    assert!(bounded_model_check(&good.tbox, Some(&good.abox), None, 2).is_some());
    assert!(bounded_model_check(&bad.tbox, Some(&bad.abox), None, 3).is_none());
}

#[test]
fn instance_examples() {
    let k = onto("ClassAssertion(Male Tom)\nObjectPropertyAssertion(hasParent Tom Mary)\nClassAssertion(Lawyer Mary)");
    let tom = Name::new("Tom");
    let mary = Name::new("Mary");
    assert!(is_instance(&k, &c("ObjectIntersectionOf(Male ObjectSomeValuesFrom(hasParent Lawyer))"), &tom).unwrap());
    assert!(!is_instance(&k, &c("ObjectSomeValuesFrom(hasParent Lawyer)"), &mary).unwrap());
    assert!(is_instance(&k, &Concept::Top, &mary).unwrap());
    let cyc = onto("ObjectPropertyAssertion(R1 x y)\nObjectPropertyAssertion(R2 x y)");
    let q = c("ObjectSomeValuesFrom(R1 ObjectSomeValuesFrom(ObjectInverseOf(R2) ObjectSomeValuesFrom(R1 Top)))");
    assert!(is_instance(&cyc, &q, &Name::new("x")).unwrap());
    assert!(!is_instance(&cyc, &q, &Name::new("y")).unwrap());
}

#[test]
fn sessions_agree_with_fresh_checks() {
    let k = onto(
        "SubClassOf(ObjectSomeValuesFrom(R C) D)\nSubClassOf(D ObjectUnionOf(E F))\nObjectPropertyAssertion(R a b)\nClassAssertion(C b)\nClassAssertion(ObjectComplementOf(E) a)\nObjectPropertyAssertion(R b c)",
    );
    let r = Reasoner::new(&k.tbox, Budget::default());
    let s = r.abox_session(&k.abox).unwrap();
    assert!(s.is_consistent());
    for q in ["D", "E", "F", "C", "ObjectSomeValuesFrom(R D)", "ObjectComplementOf(D)"] {
        for i in ["a", "b", "c"] {
            let n = Name::new(i);
            assert_eq!(s.is_instance(&c(q), &n).unwrap(), r.is_instance(&k.abox, &c(q), &n).unwrap(), "{q}({i})");
        }
    }
    assert!(s.is_instance(&c("F"), &Name::new("a")).unwrap());
}

#[test]
fn budget_is_a_distinct_outcome() {
    let t = tbox("SubClassOf(Top ObjectSomeValuesFrom(R A))\nSubClassOf(A ObjectSomeValuesFrom(S B))\nSubClassOf(B ObjectSomeValuesFrom(R ObjectComplementOf(A)))");
    let r = Reasoner::new(&t, Budget { max_nodes: 2, timeout: None });
    assert_eq!(r.is_satisfiable(&c("A")), Err(ReasonerError::NodeBudget(2)));
}

#[test]
fn deterministic_traces() {
    let t = tbox("SubClassOf(A ObjectUnionOf(B ObjectSomeValuesFrom(R A)))\nSubClassOf(B ObjectSomeValuesFrom(S C))\nTransitiveObjectProperty(R)");
    let r = Reasoner::new(&t, Budget::default());
    let a = r.check_satisfiable(&c("ObjectIntersectionOf(A ObjectComplementOf(B))")).unwrap();
    let b = r.check_satisfiable(&c("ObjectIntersectionOf(A ObjectComplementOf(B))")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn abox_with_inverse_and_role_hierarchy() {
    let k = onto(
        "SubObjectPropertyOf(headOf memberOf)\nSubClassOf(ObjectSomeValuesFrom(ObjectInverseOf(memberOf) Person) Organization)\nObjectPropertyAssertion(headOf p g)\nClassAssertion(Person p)",
    );
    assert!(is_instance(&k, &c("Organization"), &Name::new("g")).unwrap());
    assert!(!is_instance(&k, &c("Organization"), &Name::new("p")).unwrap());
    let mut ab = ABox::new();
    ab.assert_role("R", "a", "a");
    let t = tbox("SubClassOf(ObjectSomeValuesFrom(R Top) ObjectAllValuesFrom(R A))");
    let r = Reasoner::new(&t, Budget::default());
    assert!(r.is_instance(&ab, &c("A"), &Name::new("a")).unwrap());
    assert!(r.is_instance(&ab, &Concept::exists(Role::named("R"), Concept::nominal("a")), &Name::new("a")).unwrap());
}
