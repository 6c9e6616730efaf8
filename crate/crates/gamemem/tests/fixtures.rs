use std::path::PathBuf;

use gamemem::io::*;
use gamemem::strategy::product_reachable;
use gamemem::{Kind, Relation};

fn read(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn fixture_counts() {
    let fig1 = parse_arena(&read("fig1.arena")).unwrap();
    assert_eq!((fig1.n_states(), fig1.n_edges(), fig1.num_choices()), (2, 4, 2));
    let base = parse_arena(&read("fig6_base.arena")).unwrap();
    assert_eq!((base.n_states(), base.n_edges()), (3, 4));
    let prod = parse_arena(&read("fig6_product.arena")).unwrap();
    assert_eq!((prod.n_states(), prod.n_edges()), (6, 8));
    let sk = parse_skeleton(&read("fig6.skel")).unwrap();
    assert_eq!(sk.n_states(), 3);
    assert_eq!(product_reachable(&base, &sk).unwrap().arena, prod);
    assert_eq!(parse_skeleton(&read("fig5_mp.skel")).unwrap().n_states(), 2);
    assert_eq!(parse_skeleton(&read("fig5_mc.skel")).unwrap().n_states(), 3);
    assert_eq!(parse_relation(&read("genreach2.pref")).unwrap(), Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"]));
    let app = parse_relation(&read("appendixa.pref")).unwrap();
    assert_eq!(app.kind(), Kind::AppendixA);
    assert_eq!(app.colors(), fig1.colors());
}

#[test]
fn fixtures_round_trip() {
    for name in ["fig1.arena", "fig6_base.arena", "fig6_product.arena"] {
        let a = parse_arena(&read(name)).unwrap();
        let text = print_arena(&a);
        assert_eq!(print_arena(&parse_arena(&text).unwrap()), text, "{name}");
    }
    for name in ["fig5_mp.skel", "fig5_mc.skel", "fig6.skel"] {
        let text = print_skeleton(&parse_skeleton(&read(name)).unwrap());
        assert_eq!(print_skeleton(&parse_skeleton(&text).unwrap()), text, "{name}");
    }
    for name in ["genreach2.pref", "appendixa.pref"] {
        let text = print_relation(&parse_relation(&read(name)).unwrap());
        assert_eq!(print_relation(&parse_relation(&text).unwrap()), text, "{name}");
    }
}
