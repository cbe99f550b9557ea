use greenop_cli::{eval, parse, Value};
use greenop_core::*;
use std::time::Instant;

fn problem(src: &str) -> BoundaryProblem {
    match eval(&parse(src).unwrap()).unwrap() {
        Value::Problem(p) => p,
        _ => panic!(),
    }
}

fn main() {
    let t0 = Instant::now();
    let p = problem("GBP(d^3-d, BC(e(1), e(1).d, e(0).d, e(1/2).d^2, e(1/2)), ES(1, x))");
    eprintln!("build {:?}", t0.elapsed());
    let t0 = Instant::now();
    eprintln!("regular: {:?} in {:?}", p.is_regular(), t0.elapsed());
    let t0 = Instant::now();
    let g = p.greens_operator().unwrap();
    eprintln!("green in {:?}", t0.elapsed());
    let t0 = Instant::now();
    let tg = p.operator().multiply(&g).unwrap();
    eprintln!("T.G in {:?}", t0.elapsed());
    let t0 = Instant::now();
    let gtg = g.multiply(&tg).unwrap();
    eprintln!("G.T.G in {:?} zero: {}", t0.elapsed(), gtg.sub(&g).is_zero());
}
