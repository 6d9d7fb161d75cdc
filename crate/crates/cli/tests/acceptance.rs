//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nclp::suites::{
    run_suite, transpose_witness_gap, CaseVerdict, Suite, SuiteConfig, SuiteReport,
};

type Outcome = Result<String, String>;

fn config(suite: Suite, f: impl FnOnce(&mut SuiteConfig)) -> SuiteConfig {
    let mut c = suite.default_config();
    f(&mut c);
    c
}

fn run(cfg: &SuiteConfig) -> Result<SuiteReport, String> {
    run_suite(cfg).map_err(|e| format!("{}: {e}", cfg.suite))
}

fn require(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn passed(r: &SuiteReport) -> Result<(), String> {
    let first = r.cases.iter().find(|c| c.verdict == CaseVerdict::Fail);
    require(
        r.pass,
        format!(
            "{}: {} failing cases, first: {}",
            r.suite,
            r.failures,
            first
                .map(|c| format!("{} ({})", c.label, c.note.clone().unwrap_or_default()))
                .unwrap_or_default()
        ),
    )
}

fn worst(r: &SuiteReport, name: &str) -> f64 {
    r.max_defect(name).unwrap_or(f64::NAN)
}

fn clarkson() -> Outcome {
    let cfg = config(Suite::Clarkson, |c| {
        c.exponents = vec![1.0, 1.5, 3.0, 4.0];
        c.cases = 1000;
        c.tol = 1e-8;
    });
    let start = Instant::now();
    let r = run(&cfg)?;
    let secs = start.elapsed().as_secs_f64();
    passed(&r)?;
    let random = &r.cases[2..];
    let orth: Vec<_> = random
        .iter()
        .filter(|c| c.label.starts_with("orthogonal"))
        .collect();
    let over: Vec<_> = random
        .iter()
        .filter(|c| c.label.starts_with("overlapping"))
        .collect();
    require(
        orth.len() == 500 && over.len() == 500,
        "expected 500 + 500 pairs",
    )?;
    let max_orth = orth
        .iter()
        .map(|c| c.defects["clarkson"])
        .fold(0.0, f64::max);
    let min_over = over
        .iter()
        .map(|c| c.defects["clarkson"])
        .fold(f64::INFINITY, f64::min);
    let min_witness = over
        .iter()
        .map(|c| c.defects["witness"])
        .fold(f64::INFINITY, f64::min);
    require(
        max_orth < 1e-8 && min_over > 1e-6 && min_witness > 0.1,
        "thresholds",
    )?;
    require(secs < 10.0, format!("runtime {secs:.2}s"))?;
    Ok(format!(
        "orthogonal max {max_orth:.1e} < 1e-8, overlapping min {min_over:.1e} > 1e-6, {secs:.2}s"
    ))
}

fn factory_config(suite: Suite) -> SuiteConfig {
    config(suite, |c| {
        c.exponents = vec![1.0, 1.5, 3.0, 4.0, 7.0];
        c.cases = 50;
    })
}

fn factory() -> Outcome {
    let cfg = config(Suite::Factory, |c| {
        *c = SuiteConfig {
            tol: 1e-8,
            ..factory_config(Suite::Factory)
        };
    });
    let start = Instant::now();
    let r = run(&cfg)?;
    let secs = start.elapsed().as_secs_f64();
    passed(&r)?;
    let rotated_w = r
        .cases
        .iter()
        .filter(|c| c.label.contains("w≠π(1)"))
        .count();
    let non_unital = r
        .cases
        .iter()
        .filter(|c| c.label.contains("non-unital"))
        .count();
    require(rotated_w > 0 && non_unital > 0, "corner cases missing")?;
    require(secs < 60.0, format!("runtime {secs:.2}s"))?;
    Ok(format!(
        "50 instances ({rotated_w} with w≠π(1), {non_unital} non-unital): isometry {:.1e}, n=2 {:.1e}, n=3 {:.1e}, {secs:.2}s",
        worst(&r, "isometry"),
        worst(&r, "two_isometry"),
        worst(&r, "three_isometry")
    ))
}

fn classify_roundtrip() -> Outcome {
    let cfg = config(Suite::ClassifyRoundtrip, |c| {
        *c = SuiteConfig {
            tol: 1e-7,
            ..factory_config(Suite::ClassifyRoundtrip)
        };
    });
    let r = run(&cfg)?;
    passed(&r)?;
    let f = run(&factory_config(Suite::Factory))?;
    let same = r
        .cases
        .iter()
        .zip(&f.cases)
        .all(|(a, b)| a.inputs_digest == b.inputs_digest);
    require(same, "instances differ from the factory suite")?;
    Ok(format!(
        "{} maps accepted, max data distance {:.1e} < 1e-7",
        r.cases.len(),
        worst(&r, "distance")
    ))
}

fn dichotomy() -> Outcome {
    let cfg = config(Suite::Dichotomy, |c| {
        c.exponents = vec![1.0, 1.5, 3.0, 4.0];
        c.tol = 1e-8;
    });
    let r = run(&cfg)?;
    passed(&r)?;
    let p1 = &r.cases[1];
    require(
        p1.label.contains("transpose"),
        "canonical transpose case missing",
    )?;
    let w = p1.defects["witness"];
    require((w - 2.0).abs() < 1e-9, format!("p = 1 witness defect {w}"))?;
    let transposes: Vec<_> = r
        .cases
        .iter()
        .filter(|c| c.defects.contains_key("witness_bound"))
        .collect();
    require(!transposes.is_empty(), "no transpose triples")?;
    let margin = transposes
        .iter()
        .map(|c| c.defects["witness"] - c.defects["witness_bound"])
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "{} transpose triples isometric (max {:.1e}), witness ≥ |2 − 4^(1/p)| − 1e-6 (min margin {margin:.1e}); p = 1 value {w:.12}; gap at p = 4 is {:.6}",
        transposes.len(),
        worst(&r, "isometry"),
        transpose_witness_gap(4.0)
    ))
}

fn yeadon() -> Outcome {
    let r = run(&config(Suite::YeadonRoundtrip, |c| c.tol = 1e-7))?;
    passed(&r)?;
    let identities = ["orthogonal_b", "orthogonal_w", "additive_b", "additive_w"]
        .iter()
        .map(|n| worst(&r, n))
        .fold(0.0, f64::max);
    Ok(format!(
        "roundtrip max {:.1e} < 1e-7, orthogonality/additivity max {identities:.1e} < 1e-9",
        worst(&r, "roundtrip")
    ))
}

fn restriction_and_interpolation() -> Outcome {
    let sr = run(&config(Suite::StateRestriction, |c| {
        *c = SuiteConfig {
            tol: 1e-9,
            ..factory_config(Suite::StateRestriction)
        };
    }))?;
    passed(&sr)?;
    let l2 = run(&config(Suite::L2Identity, |c| {
        c.cases = 20;
        c.samples = 10;
        c.tol = 1e-8;
    }))?;
    passed(&l2)?;
    let l2_samples = (l2.cases.len() - 2) * l2.config.samples;
    require(l2_samples >= 200, "fewer than 200 samples")?;
    let ip = run(&config(Suite::Interpolation, |c| {
        c.exponents = vec![2.0, 3.0, 4.0, 8.0];
        c.samples = 500;
        c.tol = 1e-10;
    }))?;
    passed(&ip)?;
    Ok(format!(
        "φ̄∘π = φ max {:.1e}; L_2 identity max {:.1e} on {l2_samples} samples; interpolation: 0 violations over {} samples per case",
        worst(&sr, "state_restriction"),
        worst(&l2, "l2_identity"),
        ip.config.samples
    ))
}

fn extrapolation_duality() -> Outcome {
    let ex = run(&config(Suite::Extrapolation, |c| {
        c.exponents = vec![2.5, 4.0, 7.0];
        c.tol = 1e-8;
    }))?;
    passed(&ex)?;
    let du = run(&config(Suite::Duality, |c| {
        c.exponents = vec![1.5, 3.0];
        c.tol = 1e-8;
    }))?;
    passed(&du)?;
    Ok(format!(
        "transferred isometry max {:.1e}; T_p' isometry max {:.1e}, dual∘T_p − id max {:.1e}",
        worst(&ex, "transferred_isometry"),
        worst(&du, "conjugate_isometry"),
        worst(&du, "dual_inverse")
    ))
}

fn expectation_detect() -> Outcome {
    let r = run(&config(Suite::ExpectationDetect, |c| {
        c.cases = 40;
        c.samples = 500;
        c.tol = 1e-9;
    }))?;
    passed(&r)?;
    let non_inv = r.cases[2..]
        .iter()
        .filter(|c| c.label.starts_with("non-invariant"))
        .count();
    let inv = r.cases[2..]
        .iter()
        .filter(|c| c.label.starts_with("invariant"))
        .count();
    require(non_inv == 20 && inv == 20, "expected 20 + 20 inclusions")?;
    Ok(format!(
        "non-invariant: invariance defect min {:.1e}, strict gap min {:.1e}; invariant: expectation defect max {:.1e}",
        r.min_defect("invariance_detected").unwrap_or(f64::NAN),
        r.min_defect("strict_gap").unwrap_or(f64::NAN),
        worst(&r, "expectation")
    ))
}

fn nclp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nclp"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn untimed(json: &str) -> Result<serde_json::Value, String> {
    let mut v: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    v.as_object_mut()
        .ok_or("report is not an object")?
        .remove("wall_time_ms");
    Ok(v)
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nclp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn cli() -> Outcome {
    let args = [
        "verify",
        "--suite",
        "classify_roundtrip",
        "--seed",
        "3",
        "--cases",
        "10",
    ];
    let (c1, a, _) = nclp(&args);
    let (c2, b, _) = nclp(&args);
    require(c1 == 0 && c2 == 0, format!("verify exit codes {c1}, {c2}"))?;
    require(untimed(&a)? == untimed(&b)?, "reports differ")?;

    let dir = scratch_dir();
    let (alg, vec, map, state, bad) = (
        path(&dir, "a.json"),
        path(&dir, "v.json"),
        path(&dir, "m.json"),
        path(&dir, "s.json"),
        path(&dir, "bad.json"),
    );
    std::fs::write(&bad, "{\"blocks\": [[[1, 0]]").expect("write");
    let mut checks = Vec::new();
    let mut expect = |args: &[&str], code: i32, what: &str| -> Result<String, String> {
        let (c, out, err) = nclp(args);
        checks.push(format!("{what}={c}"));
        require(
            c == code,
            format!("{what}: exit {c}, expected {code}: {err}"),
        )?;
        Ok(out)
    };
    expect(&["verify", "--suite", "clarkson", "--seed", "1"], 0, "pass")?;
    expect(
        &[
            "verify", "--suite", "factory", "--cases", "3", "--tol", "1e-30",
        ],
        1,
        "fail",
    )?;
    expect(&["verify", "--suite", "no_such_suite"], 2, "unknown")?;
    expect(&["verify", "--suite", "clarkson", "--p-list", "2"], 2, "p2")?;
    expect(&["norm", &bad], 2, "malformed")?;
    expect(&["frobnicate"], 2, "usage")?;
    expect(
        &["gen", "algebra", "--sizes", "2+1", "--out", &alg],
        0,
        "gen",
    )?;
    expect(
        &[
            "gen",
            "state",
            "--algebra",
            &alg,
            "--seed",
            "4",
            "--as-vector",
            "3",
            "--out",
            &vec,
        ],
        0,
        "gen",
    )?;
    let norm = expect(&["norm", &vec], 0, "norm")?;
    require(
        norm.trim() == "1.0",
        format!("norm printed {}", norm.trim()),
    )?;
    expect(
        &[
            "gen",
            "isometry",
            "--sizes",
            "2+1",
            "--p",
            "3",
            "--seed",
            "9",
            "--state-out",
            &state,
            "--out",
            &map,
        ],
        0,
        "gen",
    )?;
    let report = expect(
        &["classify", &map, "--state", &state, "--p", "3"],
        0,
        "classify",
    )?;
    require(
        report.contains("\"verdict\": \"accept\""),
        "classify did not accept",
    )?;
    expect(&["classify", &map, "--state", &alg, "--p", "3"], 2, "shape")?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("identical reports; exits {}", checks.join(" ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("clarkson suite", clarkson),
        ("factory isometry", factory),
        ("classification roundtrip", classify_roundtrip),
        ("dichotomy", dichotomy),
        ("yeadon roundtrip", yeadon),
        (
            "state restriction / L_2 identity / interpolation",
            restriction_and_interpolation,
        ),
        ("extrapolation and duality", extrapolation_duality),
        ("expectation detection", expectation_detect),
        ("cli determinism and exit codes", cli),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.2}s]: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name} [{secs:.2}s]: {why}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
