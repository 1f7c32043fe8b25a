use boolmin::io::{
    parse_circuit, parse_formula, parse_input, read_dataset, write_circuit, write_dataset, Input, InputError,
};
use boolmin_core::datagen::random_circuit;
use boolmin_core::Formula;

const SHARED_INPUT: &str = "\
# fan-out on In2
i1 INPUT In1
i2 INPUT In2
i3 INPUT In3
a AND i1 i2
b AND i2 i3
o OR a b
OUTPUT o
";

#[test]
fn circuit_text_is_detected_and_unfolded() {
    let input = parse_input(SHARED_INPUT).unwrap();
    assert!(matches!(input, Input::Circuit(_)));
    let f = input.into_formula().unwrap();
    assert_eq!(f, Formula::parse("(In1 & In2) | (In2 & In3)").unwrap());
    assert!(matches!(
        parse_input("(a & b) # OUTPUT is only a comment here").unwrap(),
        Input::Formula(_)
    ));
}

#[test]
fn circuit_round_trip() {
    for seed in 0..30 {
        let c = random_circuit(5, 8, seed, 1000).unwrap();
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, c, "{text}");
    }
}

#[test]
fn circuit_errors_carry_lines() {
    let err = |t: &str| match parse_circuit(t) {
        Err(InputError::CircuitSyntax { line, .. }) => line,
        other => panic!("expected a syntax error, got {other:?}"),
    };
    assert_eq!(err("x INPUT a\ny XOR x x\nOUTPUT y\n"), 2);
    assert_eq!(err("x INPUT a\nx INPUT b\nOUTPUT x\n"), 2);
    assert_eq!(err("x INPUT a\ny AND x z\nOUTPUT y\n"), 2);
    assert_eq!(err("x INPUT a\nOUTPUT x\ny INPUT b\n"), 3);
    assert!(matches!(
        parse_circuit("x INPUT a\ng AND x\nOUTPUT g\n"),
        Err(InputError::InvalidCircuit(_))
    ));
    assert!(matches!(
        parse_circuit("x INPUT a\ng AND x h\nh OR x g\nOUTPUT g\n"),
        Err(InputError::InvalidCircuit(_))
    ));
}

#[test]
fn formula_errors_carry_lines() {
    match parse_formula("# header\n(a &\n b |)\n") {
        Err(InputError::Formula { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_formula("# nothing\n\n"), Err(InputError::Empty)));
}

#[test]
fn dataset_round_trip() {
    let fs: Vec<Formula> = ["a & b", "(a | b) & c", "x"]
        .iter()
        .map(|s| Formula::parse(s).unwrap())
        .collect();
    let text = write_dataset(&["made by hand".to_string()], &fs);
    assert!(text.starts_with("# made by hand\n"));
    assert_eq!(read_dataset(&text).unwrap(), fs);
    match read_dataset("a & b\n\n(c |\n") {
        Err(InputError::Formula { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
