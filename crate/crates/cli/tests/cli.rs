use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "system\tdoc\tseg_id\trater\tsource\ttarget\tcategory\tseverity\n";

fn mqmeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqmeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn write_mqm(dir: &Path, rows: &str) -> String {
    let p = dir.join("en-de.tsv");
    std::fs::write(&p, format!("{HEADER}{rows}")).unwrap();
    p.display().to_string()
}

const ROWS: &str = "\
A\td\t1\tr1\ts\tt\tAccuracy/Mistranslation\tMajor
A\td\t2\tr1\ts\tt\tFluency/Grammar\tMinor
B\td\t1\tr1\ts\tt\tNo-error\tno-error
B\td\t2\tr1\ts\tt\tFluency/Grammar\tMajor
C\td\t1\tr1\ts\tt\tAccuracy/Omission\tMinor
C\td\t2\tr1\ts\tt\tNo-error\tno-error
";

#[test]
fn score_writes_aspect_penalties() {
    let dir = tempfile::tempdir().unwrap();
    let mqm = write_mqm(dir.path(), ROWS);
    let out = dir.path().join("out");
    let o = mqmeta(&["score", "--mqm", &mqm, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        body(&out.join("en-de_system_means.csv")),
        "system,all,adequacy,fluency,other\n\
         A,3.0,2.5,0.5,0.0\n\
         B,2.5,0.0,2.5,0.0\n\
         C,0.5,0.5,0.0,0.0\n"
    );
    let text = std::fs::read_to_string(out.join("en-de_scores.csv")).unwrap();
    assert!(text.starts_with("# tool: mqmeta"));
    assert!(text.contains("# weights: major=5 minor=1"));
}

#[test]
fn malformed_severity_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let mqm = write_mqm(
        dir.path(),
        "A\td\t1\tr1\ts\tt\tAccuracy/Mistranslation\tCatastrophic\n",
    );
    let o = mqmeta(&[
        "score",
        "--mqm",
        &mqm,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn bad_config_and_usage_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "seed = 1\nbogus = 2\n").unwrap();
    let o = mqmeta(&["bias", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = mqmeta(&["bias"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_headers_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("synthetic");
    let d = data.to_str().unwrap();
    let o = mqmeta(&[
        "generate",
        "--out-dir",
        d,
        "--num-systems",
        "5",
        "--num-segments",
        "60",
        "--seed",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let run = |out: &str| {
        let out = dir.path().join(out);
        for cmd in ["metaeval", "bias", "breakdown", "spa-plane", "sensitivity"] {
            let o = mqmeta(&[
                cmd,
                "--data",
                d,
                "--out-dir",
                out.to_str().unwrap(),
                "--resamples",
                "100",
                "--seed",
                "9",
            ]);
            assert!(
                o.status.success(),
                "{cmd}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        out
    };
    let (a, b) = (run("a"), run("b"));
    let headers = [
        ("metaeval.csv", "set,setup,metric,pa,spa,pa_rank,spa_rank"),
        ("bias.csv", "set,setup,method,systems,f_adequacy,p_adequacy,f_fluency,p_fluency,delta_p,b,dominant,concordant,discordant,tied"),
        ("breakdown.csv", "set,setup,metric,concordant_pairs,pa_concordant,discordant_pairs,agree_adequacy,agree_fluency,metric_tie_fraction,tied_pairs"),
        ("spa_plane.csv", "set,setup,series,label,x,y"),
        ("sensitivity.csv", "set,setup,metric,axis,unnormalized,normalized,pairs_used"),
    ];
    for (file, header) in headers {
        let text = body(&a.join(file));
        assert_eq!(text.lines().next(), Some(header), "{file}");
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    for svg in ["spa_plane_original.svg", "breakdown_original.svg"] {
        assert!(std::fs::read_to_string(a.join(svg))
            .unwrap()
            .starts_with("<svg"));
    }
    // identity rows
    let meta = body(&a.join("metaeval.csv"));
    for line in meta.lines().filter(|l| l.contains(",all-mqm,")) {
        assert!(line.contains(",1.0,1.0,1,1"), "{line}");
    }
}

#[test]
fn synthesize_is_identity_for_original() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s");
    let d = data.to_str().unwrap();
    assert!(mqmeta(&[
        "generate",
        "--out-dir",
        d,
        "--num-systems",
        "3",
        "--num-segments",
        "10"
    ])
    .status
    .success());
    let out = dir.path().join("o");
    let o = mqmeta(&[
        "synthesize",
        "--data",
        d,
        "--systems",
        "original",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let synth = out.join("s").join("original");
    assert_eq!(
        std::fs::read_to_string(synth.join("adequacy.tsv")).unwrap(),
        std::fs::read_to_string(data.join("adequacy.tsv")).unwrap()
    );
    let manifest = body(&synth.join("assignment.csv"));
    assert!(manifest.lines().skip(1).all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        f[0] == f[2]
    }));
}
