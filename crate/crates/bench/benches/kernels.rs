use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rdsym_core::classify::classify_imaged;
use rdsym_core::expr::{parse, Point};
use rdsym_core::model::{ImagedEquation, Interval};
use rdsym_core::solutions::{catalog, verify_on_grid, GridSpec};
use rdsym_core::special::{jacobi, whittaker_m};
use rdsym_core::symmetry::{cubic_reduction_operators, verify_lie, verify_nonclassical, JetBox};
use rdsym_core::tables::{self, Params};

fn special(c: &mut Criterion) {
    c.bench_function("jacobi sn/cn/dn", |b| {
        b.iter(|| jacobi(black_box(1.3), black_box(0.7)))
    });
    c.bench_function("whittaker M", |b| {
        b.iter(|| whittaker_m(black_box(-0.25), black_box(0.25), black_box(3.0)))
    });
}

fn expressions(c: &mut Criterion) {
    let src = "2*sqrt(2)*exp(-0.5*x/2)*(x-0.5*t)*ds((x-0.5*t)^2 + 6*t, sqrt(2)/2)";
    c.bench_function("parse", |b| b.iter(|| parse(black_box(src)).unwrap()));
    let e = parse(src).unwrap();
    c.bench_function("second x-derivative", |b| {
        b.iter(|| e.diff("x").unwrap().diff("x").unwrap().simplify())
    });
    let p = Point::from_pairs(&[("t", 0.7), ("x", 1.1)]);
    c.bench_function("eval", |b| b.iter(|| e.eval(black_box(&p)).unwrap()));
}

fn symmetry(c: &mut Criterion) {
    let d = Interval::new(0.5, 2.0);
    let p: Params = [("delta", -1.0), ("p", 0.5)]
        .into_iter()
        .map(|(k, v)| (k.into(), v))
        .collect();
    let (f, h) = tables::imaged_template("6", 3.0, &p).unwrap();
    let eq = ImagedEquation::new(f, h, 3.0, d);
    let basis = tables::imaged_basis("6", 3.0, &p).unwrap();
    c.bench_function("verify_lie row 6, 64 jets", |b| {
        b.iter(|| verify_lie(&eq, &basis[2], &JetBox::on(d), 64, 1e-8).unwrap())
    });
    let (cubic, ops) = cubic_reduction_operators(-1.0, 1.0, d).unwrap();
    c.bench_function("verify_nonclassical cubic, 64 jets", |b| {
        b.iter(|| verify_nonclassical(&cubic, &ops[0].1, &JetBox::on(d), 64, 1e-8).unwrap())
    });
    c.bench_function("classify_imaged row 6", |b| {
        b.iter(|| classify_imaged(&eq).unwrap())
    });
}

fn solutions(c: &mut Criterion) {
    let e = catalog().into_iter().find(|e| e.id == "qfam/ds").unwrap();
    let b0 = e.defaults();
    c.bench_function("verify_on_grid 20x20", |b| {
        b.iter(|| verify_on_grid(&e, &b0, &GridSpec::default()).unwrap())
    });
}

criterion_group!(benches, special, expressions, symmetry, solutions);
criterion_main!(benches);
