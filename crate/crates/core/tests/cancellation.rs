use confint_core::face_combinatorics::boundary_cancellation_check;

#[test]
fn degree_two_cancellation_holds() {
    let r = boundary_cancellation_check(2).unwrap();
    assert_eq!(r.labelled_diagrams, 115_200);
    assert_eq!(r.faces_per_diagram, 26);
    assert_eq!(r.survivors, vec!["F(V)".to_string()]);
    assert!(r.ihx_groups > 0);
    assert!(r.sigma_pairs > 0);
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
}
