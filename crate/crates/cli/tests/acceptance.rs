//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness; exits non-zero if any check fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use lattice_homology::hplus::kernel_u_cross_check;
use lattice_homology::moves::{blow_down, check_convention_invariance, check_exactness, SurgeryTriple};
use lattice_homology::random::{blowdownable_forest, negdef_forest, surgery_triple_data, ForestSpec};
use lattice_homology::{compute_homology, CharVector, ClassRef, Error, Limits, PlumbingForest, RawForest};
use lattice_homology_cli::{exit_code_for, run, EXIT_INVARIANT};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn lathom(args: &[&str]) -> (i32, Value) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["lathom", "--json"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    let v = serde_json::from_slice(&out).unwrap_or(Value::Null);
    (code, v)
}

fn u(v: &Value, path: &str) -> u64 {
    v.pointer(path).and_then(Value::as_u64).unwrap_or(u64::MAX)
}

fn b(v: &Value, path: &str) -> Option<bool> {
    v.pointer(path).and_then(Value::as_bool)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

type Check = Result<String, String>;

/// Lower bound `total_dim >= |det|`, recorded for every graph the suites touch.
#[derive(Default)]
struct LowerBound {
    graphs: usize,
    violations: Vec<String>,
}

impl LowerBound {
    fn record(&mut self, what: &str, total: u64, det: u64) {
        self.graphs += 1;
        if total < det {
            self.violations.push(format!("{what}: {total} < {det}"));
        }
    }
}

fn lens(p: i64) -> PlumbingForest {
    RawForest::new().vertex("v", -p).validate().unwrap()
}

fn c1_lens(lb: &mut LowerBound) -> Check {
    let mut slowest = Duration::ZERO;
    for p in 1..=20i64 {
        let dir = std::env::temp_dir().join(format!("lathom-acc-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join(format!("lens_{p}.plumb"));
        std::fs::write(&file, format!("vertex v -{p}\n")).unwrap();
        let ((code, v), t) = timed(|| lathom(&["homology", file.to_str().unwrap()]));
        slowest = slowest.max(t);
        let total = u(&v, "/result/total_dim");
        lb.record(&format!("lens {p}"), total, u(&v, "/result/det"));
        if code != 0 || total != p as u64 {
            return Err(format!("p = {p}: exit {code}, total_dim {total}"));
        }
        if t > Duration::from_secs(1) {
            return Err(format!("p = {p} took {t:?}"));
        }
    }
    Ok(format!("total_dim = p for p = 1..20, slowest {slowest:?}"))
}

fn c2_e8(lb: &mut LowerBound) -> Check {
    let ((code, v), t) = timed(|| lathom(&["classify", &fixture("e8.plumb")]));
    let total = u(&v, "/result/dim_h");
    let det = u(&v, "/result/abs_det");
    lb.record("e8", total, det);
    let bad = u(&v, "/result/bad_vertex_count");
    let rational = b(&v, "/result/rational");
    let lspace = b(&v, "/result/dims/is_instanton_lspace");
    let ok = code == 0
        && total == 1
        && det == 1
        && bad == 1
        && rational == Some(true)
        && lspace == Some(true)
        && t < Duration::from_secs(1);
    let msg = format!("dim {total}, |det| {det}, bad {bad}, rational {rational:?}, L-space {lspace:?}, {t:?}");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3_sign_relation() -> Check {
    for p in 1..=10i64 {
        let h = compute_homology(&lens(p), &Limits::default()).map_err(|e| e.to_string())?;
        let lo = h.class_of(&CharVector::new(vec![-p]));
        let hi = h.class_of(&CharVector::new(vec![p]));
        let expected = if p % 2 == 0 { 1 } else { -1 };
        let ok = match (lo, hi) {
            (ClassRef::Class { orbit: o1, class: c1, sign: s1 }, ClassRef::Class { orbit: o2, class: c2, sign: s2 }) => {
                o1 == o2 && c1 == c2 && s1 * s2 == expected
            }
            _ => false,
        };
        if !ok {
            return Err(format!("p = {p}: {lo:?} vs {hi:?}"));
        }
    }
    Ok("[k_-p] = (-1)^p [k_p] for p = 1..10".into())
}

fn c4_leaf3(lb: &mut LowerBound) -> Check {
    let ((code, v), t) = timed(|| lathom(&["homology", &fixture("twin_star_leaf3.plumb")]));
    let det = u(&v, "/result/det");
    let total = u(&v, "/result/total_dim");
    let isharp = u(&v, "/result/dims/dim_isharp");
    lb.record("twin star, leaf -3", total, det);
    let msg = format!("|det| {det}, dim H {total}, dim I# {isharp}, {t:?}");
    if code == 0 && det == 13 && total == 14 && isharp == 15 && t < Duration::from_secs(30) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c5_m038(lb: &mut LowerBound) -> Check {
    let mut parts = Vec::new();
    for (file, want) in [("m038_a.sfs", 7u64), ("m038_b.sfs", 10)] {
        let data = std::fs::read_to_string(fixture(file)).unwrap();
        let ((code, v), t) = timed(|| lathom(&["sfs", "--sfs", data.trim(), "homology"]));
        let det = u(&v, "/result/det");
        let total = u(&v, "/result/total_dim");
        lb.record(file, total, det);
        let got = (2 * total).wrapping_sub(det);
        parts.push(format!("{file}: 2*{total}-{det} = {got} ({t:?})"));
        if code != 0 || got != want || t > Duration::from_secs(30) {
            return Err(parts.join("; "));
        }
    }
    Ok(parts.join("; "))
}

fn c6_twin_star(lb: &mut LowerBound) -> Check {
    let (code, v) = lathom(&["classify", &fixture("twin_star.plumb")]);
    let total = u(&v, "/result/dim_h");
    let det = u(&v, "/result/abs_det");
    lb.record("twin star", total, det);
    let rational = b(&v, "/result/rational");
    let lspace = b(&v, "/result/dims/is_instanton_lspace");
    let msg = format!("rational {rational:?}, L-space {lspace:?}, dim H {total} vs |det| {det}");
    if code == 0 && rational == Some(false) && lspace == Some(false) && total > det {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn spec() -> ForestSpec {
    ForestSpec::default()
}

fn c7_oracle(lb: &mut LowerBound) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let limits = Limits::default();
    let (res, t) = timed(|| {
        for i in 0..200 {
            let f = negdef_forest(&mut rng, &spec());
            let c = kernel_u_cross_check(&f, &limits).map_err(|e| format!("graph {i}: {e}"))?;
            let total: u64 = c.orbits.iter().map(|o| o.homology_dim).sum();
            lb.record(&format!("oracle graph {i}"), total, c.orbits.len() as u64);
            if !c.agrees {
                return Err(format!("graph {i}: {:?}", c.orbits));
            }
        }
        Ok(())
    });
    res?;
    if t > Duration::from_secs(600) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("200/200 forests agree per orbit, {t:?}"))
}

fn c8_exactness(lb: &mut LowerBound) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b22);
    let spec = ForestSpec {
        max_vertices: 5,
        ..spec()
    };
    for i in 0..100 {
        let (f, v) = surgery_triple_data(&mut rng, &spec);
        let t = SurgeryTriple::new(&f, v).map_err(|e| format!("triple {i}: {e}"))?;
        let r = check_exactness(&t, &Limits::default()).map_err(|e| format!("triple {i}: {e}"))?;
        for (g, dim) in [(t.minus(), r.dim_minus), (t.base(), r.dim_base), (t.plus(), r.dim_plus)] {
            let det = g.intersection_form().abs_det().unwrap_or(0);
            lb.record(&format!("triple {i}"), dim, det);
        }
        if !r.is_exact() {
            return Err(format!("triple {i} not exact: {r:?}"));
        }
    }
    Ok("100/100 random triples exact".into())
}

fn c9_blowdown(lb: &mut LowerBound) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c33);
    for i in 0..100 {
        let (f, x) = blowdownable_forest(&mut rng, &spec());
        let r = blow_down(&f, x, &Limits::default()).map_err(|e| format!("graph {i}: {e}"))?;
        let det = f.intersection_form().abs_det().unwrap_or(0);
        lb.record(&format!("blow-down {i}"), r.dim_before, det);
        lb.record(&format!("blow-down {i} result"), r.dim_after, det);
        if !r.is_isomorphism() {
            return Err(format!("graph {i}: {r:?}"));
        }
    }
    Ok("100/100 blow-downs preserve total and per-orbit dims".into())
}

fn c10_convention(lb: &mut LowerBound) -> Check {
    let mut graphs: Vec<(String, PlumbingForest)> = Vec::new();
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures"].iter().collect();
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "plumb" || x == "json"))
        .collect();
    names.sort();
    for p in names {
        let text = std::fs::read_to_string(&p).unwrap();
        let f = lattice_homology::format::parse_plumbing(&text).map_err(|e| e.to_string())?;
        graphs.push((p.file_name().unwrap().to_string_lossy().into_owned(), f));
    }
    for s in ["m038_a.sfs", "m038_b.sfs"] {
        let data = lattice_homology::SeifertData::parse(&std::fs::read_to_string(fixture(s)).unwrap()).unwrap();
        graphs.push((s.into(), lattice_homology::seifert_to_plumbing(&data).unwrap().forest));
    }
    let fixtures = graphs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d44);
    for i in 0..100 {
        graphs.push((format!("random {i}"), negdef_forest(&mut rng, &spec())));
    }
    for (name, f) in &graphs {
        let r = check_convention_invariance(f, &Limits::default()).map_err(|e| format!("{name}: {e}"))?;
        let det = f.intersection_form().abs_det().unwrap_or(0);
        lb.record(name, r.dim_before, det);
        lb.record(name, r.dim_after, det);
        if !r.is_invariant() {
            return Err(format!("{name}: {r:?}"));
        }
    }
    Ok(format!("{fixtures} fixtures and 100 random forests invariant"))
}

fn c11_lower_bound(lb: &LowerBound) -> Check {
    let mapped = exit_code_for(&Error::NegativeOddDimension { total: 1, det: 2 });
    if mapped != EXIT_INVARIANT {
        return Err(format!("violation maps to exit {mapped}"));
    }
    if !lb.violations.is_empty() {
        return Err(lb.violations.join("; "));
    }
    Ok(format!("total_dim >= |det| on {} graphs; a violation exits {mapped}", lb.graphs))
}

fn main() -> ExitCode {
    let mut lb = LowerBound::default();
    let mut results: Vec<(u32, &str, Check)> = vec![
        (1, "lens spaces", c1_lens(&mut lb)),
        (2, "E8", c2_e8(&mut lb)),
        (3, "sign relation", c3_sign_relation()),
        (4, "twin star with -3 leaf", c4_leaf3(&mut lb)),
        (5, "m038 fillings", c5_m038(&mut lb)),
        (6, "twin star", c6_twin_star(&mut lb)),
        (7, "homology vs ker U", c7_oracle(&mut lb)),
        (8, "exactness suite", c8_exactness(&mut lb)),
        (9, "blow-down suite", c9_blowdown(&mut lb)),
        (10, "convention suite", c10_convention(&mut lb)),
    ];
    results.push((11, "lower bound", c11_lower_bound(&lb)));
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(m) => println!("PASS [{n:>2}] {name}: {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL [{n:>2}] {name}: {m}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
