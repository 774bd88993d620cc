mod common;

use common::{random_symmetric, rng};
use ggm_core::io::{load_multilayer, parse_pajek, read_matrix_csv, write_matrix_csv};
use ggm_core::Error;
use proptest::prelude::*;

const VALID: &str = "% students\n*Network test\n*Vertices 4\n1 \"Ana\"\n2 \"Bo b\"\n3 c\n4\n*Arcs :1 \"likes\"\n1 2 2.5\n2 1 1\n*Edges :2\n3 4\n2 3 0.5\n";

#[test]
fn pajek_examples() {
    let net = parse_pajek("*Vertices 2\n*Edges\n1 2 1.0\n").unwrap();
    let g = net.to_graph(false).unwrap();
    assert_eq!(g.n_nodes(), 2);
    assert_eq!(g.edges(), vec![(0, 1)]);
    assert_eq!(g.adjacency().get(0, 1), 1.0);

    let g = parse_pajek("*Vertices 3\n*Arcs\n1 2 1\n2 1 1\n")
        .unwrap()
        .to_graph(false)
        .unwrap();
    assert_eq!(g.edge_count(), 1);

    match parse_pajek("*Vertices 2\n*Edges\n1 5 1\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn pajek_multirelational_file() {
    let net = parse_pajek(VALID).unwrap();
    assert_eq!(net.relations(), vec![1, 2]);
    assert_eq!(net.labels[1].as_deref(), Some("Bo b"));
    let all = net.to_graph(false).unwrap();
    assert_eq!(all.edge_count(), 3);
    assert_eq!(all.adjacency().get(0, 1), 2.5);
    let r2 = net.relation_graph(2, true).unwrap();
    assert_eq!(r2.edges(), vec![(1, 2), (2, 3)]);
}

#[test]
fn pajek_rejects_unsupported_or_malformed() {
    for text in [
        "*Vertices 3 2\n",
        "*Vertices x\n",
        "*Vertices 2\n*Matrix\n0 1\n1 0\n",
        "*Vertices 2\n*Edges\n1 2 heavy\n",
        "*Edges\n1 2\n",
        "*Vertices 2\n*Edges\n1\n",
    ] {
        assert!(
            matches!(parse_pajek(text), Err(Error::Parse { .. })),
            "{text:?}"
        );
    }
}

#[test]
fn csv_round_trip_six_by_six() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let m = random_symmetric(6, &mut rng(41)).scale(1e3);
    write_matrix_csv(&m, &path).unwrap();
    let back = read_matrix_csv(&path).unwrap();
    for (a, b) in m.as_matrix().iter().zip(back.as_matrix().iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn load_multilayer_checks_vertex_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.net");
    let b = dir.path().join("b.net");
    std::fs::write(&a, "*Vertices 3\n*Edges\n1 2\n").unwrap();
    std::fs::write(&b, "*Vertices 3\r\n*Edges\r\n2 3\r\n").unwrap();
    let layers = load_multilayer(&[&a, &b], false).unwrap();
    assert_eq!(layers.len(), 2);
    assert!(layers[1].has_edge(1, 2));
    std::fs::write(&b, "*Vertices 5\n").unwrap();
    assert!(matches!(
        load_multilayer(&[&a, &b], false),
        Err(Error::InvalidInput(_))
    ));
}

fn split_outside_quotes(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                out.last_mut().unwrap().push(c);
            }
            ' ' if !quoted => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Random whitespace and comment noise inserted between the tokens of a valid file.
fn perturb(text: &str, noise: &[u8]) -> String {
    let mut out = String::new();
    let mut it = noise.iter().cycle();
    for line in text.lines() {
        match it.next().unwrap() % 4 {
            0 => out.push_str("% comment\n"),
            1 => out.push('\n'),
            _ => {}
        }
        for (i, tok) in split_outside_quotes(line).into_iter().enumerate() {
            if i > 0 {
                let pad = 1 + (*it.next().unwrap() % 3) as usize;
                for _ in 0..pad {
                    out.push(if it.next().unwrap() % 2 == 0 {
                        ' '
                    } else {
                        '\t'
                    });
                }
            }
            out.push_str(&tok);
        }
        out.push_str(if it.next().unwrap() % 2 == 0 {
            "\n"
        } else {
            " \r\n"
        });
    }
    out
}

proptest! {
    #[test]
    fn pajek_tolerates_whitespace_and_comments(noise in prop::collection::vec(any::<u8>(), 1..64)) {
        let parsed = parse_pajek(&perturb(VALID, &noise));
        let expected = parse_pajek(VALID).unwrap();
        prop_assert_eq!(parsed.unwrap(), expected);
    }

    #[test]
    fn pajek_never_panics(text in "(\\*[A-Za-z]{0,9}|[0-9 .\"%:\\-]{0,12}|\n){0,40}") {
        match parse_pajek(&text) {
            Ok(_) | Err(Error::Parse { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error kind: {e}"),
        }
    }

    #[test]
    fn pajek_never_panics_on_mutated_files(pos in 0usize..200, byte in any::<u8>()) {
        let mut bytes = VALID.as_bytes().to_vec();
        let p = pos % bytes.len();
        bytes[p] = byte;
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_pajek(&text);
    }
}
