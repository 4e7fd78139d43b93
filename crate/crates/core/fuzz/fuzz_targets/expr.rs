#![no_main]

use libfuzzer_sys::fuzz_target;
use wgfem::expr::{Expr, MAX_DEPTH};

fn tree_depth(e: &Expr) -> usize {
    match e {
        Expr::Num(_) | Expr::Var(_) => 1,
        Expr::Neg(a) | Expr::Call(_, a) => 1 + tree_depth(a),
        Expr::Bin(_, a, b) | Expr::Atan2(a, b) => 1 + tree_depth(a).max(tree_depth(b)),
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(e) = Expr::parse(src) else {
        return;
    };
    let p = [0.25, -0.5, 0.75];
    let _ = e.eval(&p);
    for axis in 0..3 {
        let _ = e.diff(axis).eval(&p);
    }
    // The printed form is fully parenthesized and costs the parser a few
    // nesting levels per tree level, so only shallow trees must round-trip.
    if tree_depth(&e) <= MAX_DEPTH / 4 {
        let printed = e.to_string();
        let back = Expr::parse(&printed).expect("printed expression parses");
        assert_eq!(back.to_string(), printed);
    }
});
