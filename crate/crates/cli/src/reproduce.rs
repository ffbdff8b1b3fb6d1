use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sierpack::certify::{lower_bound_closed_form, lower_bound_sequence, Recurrence};
use sierpack::data::FILES;
use sierpack::{
    block_vertices, certify_generalized_tiling, certify_triangle_tiling, chi_rho, gen_generalized,
    gen_sierpinski, gen_triangle, is_packing_k_colorable, k4e_eleven_from_tile,
    search_certified_coloring, tile_coloring, verify_packing_coloring, verify_subgraph_embedding,
    BaseGraph, CertMode, CertStatus, ColorConstraints, Coloring, Decision, EmbeddingMap, Error,
    Family, Graph, SearchConfig, SolveStatus,
};

use crate::{Ctx, Profile, EXIT_FAIL};

#[derive(Serialize)]
struct InputHash {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct CheckRecord {
    id: String,
    anchor: String,
    expected: String,
    observed: String,
    pass: bool,
    elapsed_ms: u64,
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    tool_version: &'static str,
    profile: &'static str,
    inputs: Vec<InputHash>,
    checks: Vec<CheckRecord>,
    passed: usize,
    failed: usize,
    elapsed_ms: u64,
}

struct DataSet {
    files: BTreeMap<String, String>,
}

impl DataSet {
    fn load(dir: Option<&Path>) -> Result<Self, Error> {
        let mut files = BTreeMap::new();
        for (name, text) in FILES {
            let body = match dir {
                None => text.to_string(),
                Some(d) => {
                    let p = d.join(name);
                    if !p.exists() {
                        return Err(Error::MissingData(p));
                    }
                    fs::read_to_string(&p)?
                }
            };
            files.insert(name.to_string(), body);
        }
        Ok(Self { files })
    }

    fn text(&self, name: &str) -> &str {
        &self.files[name]
    }

    fn coloring(&self, name: &str) -> Result<Coloring, Error> {
        Coloring::parse(self.text(name))
    }

    fn graph(&self, name: &str) -> Result<Graph, Error> {
        Graph::parse(self.text(name))
    }

    fn map(&self, name: &str) -> Result<EmbeddingMap, Error> {
        EmbeddingMap::parse(self.text(name))
    }

    fn hashes(&self) -> Vec<InputHash> {
        self.files
            .iter()
            .map(|(file, body)| InputHash {
                file: file.clone(),
                sha256: hex::encode(Sha256::digest(body.as_bytes())),
            })
            .collect()
    }
}

type Outcome = Result<(String, bool), Error>;

struct Suite<'a> {
    ctx: &'a Ctx,
    data: &'a DataSet,
    records: Vec<CheckRecord>,
}

impl Suite<'_> {
    fn check(
        &mut self,
        id: &str,
        anchor: &str,
        expected: &str,
        f: impl FnOnce(&DataSet) -> Outcome,
    ) {
        let t = Instant::now();
        let (observed, pass) = match f(self.data) {
            Ok(r) => r,
            Err(e) => (format!("error: {e}"), false),
        };
        let elapsed_ms = t.elapsed().as_millis() as u64;
        self.ctx.say(&format!(
            "{:<4} {id:<28} expected {expected:<22} observed {observed}",
            if pass { "PASS" } else { "FAIL" }
        ));
        self.records.push(CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            expected: expected.into(),
            observed,
            pass,
            elapsed_ms,
        });
    }
}

fn base(name: &str) -> BaseGraph {
    BaseGraph::library(name).expect("library base")
}

fn chi_value(g: &Graph, budget: Duration, want: u32) -> Outcome {
    let r = chi_rho(g, budget)?;
    Ok(match r.status {
        SolveStatus::Exact => (r.upper.to_string(), r.upper == want),
        _ => (format!("{}..{} (no exact value)", r.lower, r.upper), false),
    })
}

fn decision(g: &Graph, k: u32, cons: &ColorConstraints, budget: Duration) -> Outcome {
    Ok(match is_packing_k_colorable(g, k, cons, budget)? {
        Decision::Unsat => ("UNSAT".into(), true),
        Decision::Sat(_) => ("SAT".into(), false),
        Decision::Timeout => ("TIMEOUT".into(), false),
    })
}

fn verified(g: &Graph, c: &Coloring, want: u32) -> Outcome {
    let r = verify_packing_coloring(g, c)?;
    let ok = r.ok() && c.max_color() == want;
    Ok((
        format!(
            "{} max {}",
            if r.ok() { "valid" } else { "invalid" },
            c.max_color()
        ),
        ok,
    ))
}

fn union_of(g: &Graph, prefixes: &[&str]) -> Result<Graph, Error> {
    let keep: Vec<String> = prefixes
        .iter()
        .flat_map(|p| block_vertices(p, 3, 4))
        .collect();
    g.induced_subgraph(&keep)
}

fn quick_checks(s: &mut Suite<'_>, budget: Duration) {
    let exact: [(&str, &str, Family, usize, u32); 10] = [
        (
            "chi S^1_C4",
            "chi(S^n_C4) = 3, 4, 5",
            Family::Generalized(base("C4")),
            1,
            3,
        ),
        (
            "chi S^2_C4",
            "chi(S^n_C4) = 3, 4, 5",
            Family::Generalized(base("C4")),
            2,
            4,
        ),
        (
            "chi S^1_P4",
            "chi(S^n_P4) = 3, 4, 5",
            Family::Generalized(base("P4")),
            1,
            3,
        ),
        (
            "chi S^2_P4",
            "chi(S^n_P4) = 3, 4, 5",
            Family::Generalized(base("P4")),
            2,
            4,
        ),
        (
            "chi S^1_K13",
            "chi(S^n_K13) = 2, 3",
            Family::Generalized(base("K13")),
            1,
            2,
        ),
        (
            "chi S^2_K13",
            "chi(S^n_K13) = 2, 3",
            Family::Generalized(base("K13")),
            2,
            3,
        ),
        (
            "chi S^2_K4E",
            "chi(S^n_K4E) = 3, 6, 8",
            Family::Generalized(base("K4E")),
            2,
            6,
        ),
        ("chi ST^0", "chi(ST^n_3) = 3, 4, 8", Family::Triangle, 0, 3),
        ("chi ST^1", "chi(ST^n_3) = 3, 4, 8", Family::Triangle, 1, 4),
        ("chi ST^2", "chi(ST^n_3) = 3, 4, 8", Family::Triangle, 2, 8),
    ];
    for k in 2..=6u32 {
        s.check(&format!("chi K{k}"), "chi(K_k) = k", &k.to_string(), |_| {
            chi_value(&gen_sierpinski(1, k as usize)?, budget, k)
        });
    }
    s.check("chi S^1_K4E", "chi(S^n_K4E) = 3, 6, 8", "3", |_| {
        chi_value(&gen_generalized(1, &base("K4E"))?, budget, 3)
    });
    s.check("chi S^1_PAW", "chi(paw) = 3", "3", |_| {
        chi_value(&gen_generalized(1, &base("PAW"))?, budget, 3)
    });
    for (id, anchor, family, n, want) in exact {
        s.check(id, anchor, &want.to_string(), |_| {
            chi_value(&family.graph(n)?, budget, want)
        });
    }

    s.check("H not 4-colorable", "H needs 5 colors", "UNSAT", |d| {
        decision(&d.graph("h.graph")?, 4, &ColorConstraints::none(), budget)
    });
    s.check("H' not 3-colorable", "H' needs 4 colors", "UNSAT", |d| {
        decision(
            &d.graph("hprime.graph")?,
            3,
            &ColorConstraints::none(),
            budget,
        )
    });
    let embeds = [
        (
            "H in S^3_C4",
            "h.graph",
            Family::Generalized(base("C4")),
            3,
            "h_into_s3c4.map",
        ),
        (
            "H in S^3_P4",
            "h.graph",
            Family::Generalized(base("P4")),
            3,
            "h_into_s3p4.map",
        ),
        (
            "H' in S^2_C4",
            "hprime.graph",
            Family::Generalized(base("C4")),
            2,
            "hprime_into_s2c4.map",
        ),
    ];
    for (id, src, family, n, map) in embeds {
        s.check(id, "subgraph embedding", "embedding", |d| {
            let r = verify_subgraph_embedding(&d.graph(src)?, &family.graph(n)?, &d.map(map)?)?;
            Ok((format!("{r:?}"), r.is_ok()))
        });
    }
    s.check(
        "S^2_3 in S^2_K4E",
        "S^2_3 inside S^2_K4E",
        "embedding",
        |d| {
            let r = verify_subgraph_embedding(
                &gen_sierpinski(2, 3)?,
                &gen_generalized(2, &base("K4E"))?,
                &d.map("s23_into_s2k4e.map")?,
            )?;
            Ok((format!("{r:?}"), r.is_ok()))
        },
    );

    let s3 = gen_generalized(3, &base("K4E")).expect("S^3_K4E");
    s.check(
        "7 colors needed (3-side)",
        "7 colors on 3S^2 plus 03S^1, 23S^1",
        "UNSAT",
        |_| {
            decision(
                &union_of(&s3, &["3", "03", "23"])?,
                6,
                &ColorConstraints::none(),
                budget,
            )
        },
    );
    for side in ["03", "23"] {
        s.check(
            &format!("color 7 forced in {side}"),
            "color 7 outside 3S^2 needed in both small blocks",
            "UNSAT",
            |_| {
                let mut cons = ColorConstraints::none();
                for v in block_vertices("3", 3, 4)
                    .into_iter()
                    .chain(block_vertices(side, 3, 4))
                {
                    cons.forbid(v, [7]);
                }
                decision(&union_of(&s3, &["3", "03", "23"])?, 7, &cons, budget)
            },
        );
    }

    let shipped = [
        ("fig5_s3c4.coloring", Family::Generalized(base("C4")), 3, 5),
        (
            "fig7_s2k13.coloring",
            Family::Generalized(base("K13")),
            2,
            3,
        ),
        (
            "fig10_s2k4e.coloring",
            Family::Generalized(base("K4E")),
            2,
            6,
        ),
        (
            "fig11_s3k4e.coloring",
            Family::Generalized(base("K4E")),
            3,
            8,
        ),
        ("fig13_st1.coloring", Family::Triangle, 1, 4),
        ("fig14_st2.coloring", Family::Triangle, 2, 8),
    ];
    for (file, family, n, want) in shipped {
        s.check(
            file,
            "shipped packing coloring",
            &format!("valid max {want}"),
            |d| verified(&family.graph(n)?, &d.coloring(file)?, want),
        );
    }
    s.check(
        "K4E 11-coloring",
        "chi(S^n_K4E) <= 11",
        "valid max 11",
        |d| {
            let c = k4e_eleven_from_tile(&d.coloring("fig12_s4k4e.coloring")?);
            verified(&gen_generalized(5, &base("K4E"))?, &c, 11)
        },
    );

    let certs = [
        ("lift fig5", "C4", 3, "fig5_s3c4.coloring"),
        ("lift fig7", "K13", 2, "fig7_s2k13.coloring"),
    ];
    for (id, b, m, file) in certs {
        s.check(
            id,
            "block coloring tiles all dimensions",
            "CERTIFIED",
            |d| {
                let r = certify_generalized_tiling(
                    &base(b),
                    m,
                    &d.coloring(file)?,
                    CertMode::Refined,
                    2,
                )?;
                Ok((r.status_line(), r.is_certified()))
            },
        );
    }
    s.check(
        "lift K4E 11-coloring",
        "chi(S^n_K4E) <= 11 for all n",
        "CERTIFIED or EMPIRICAL 7",
        |d| {
            let c = k4e_eleven_from_tile(&d.coloring("fig12_s4k4e.coloring")?);
            let r = certify_generalized_tiling(&base("K4E"), 5, &c, CertMode::Refined, 2)?;
            let ok = matches!(r.status, CertStatus::Certified | CertStatus::Empirical(7));
            Ok((r.status_line(), ok))
        },
    );
    s.check(
        "lift fig14",
        "ST^2 coloring does not tile",
        "REFUTED",
        |d| {
            let r = certify_triangle_tiling(2, &d.coloring("fig14_st2.coloring")?, 2)?;
            Ok((r.status_line(), matches!(r.status, CertStatus::Refuted(_))))
        },
    );

    s.check(
        "bound recurrence",
        "a_n closed form, k = 4..10, n <= 30",
        "agree",
        |_| {
            for k in 4..=10 {
                let seq = lower_bound_sequence(k, 30, Recurrence::Canonical)?;
                for n in 1..=30 {
                    if seq.get(n) != Some(&lower_bound_closed_form(k, n)?) {
                        return Ok((format!("differ at k={k} n={n}"), false));
                    }
                }
            }
            Ok(("agree".into(), true))
        },
    );
    s.check("chi S^2_4", "chi(S^2_4) >= a_2 = 10", "10", |_| {
        chi_value(&gen_sierpinski(2, 4)?, budget, 10)
    });
}

fn full_checks(s: &mut Suite<'_>, budget: Duration) {
    for (b, want) in [("C4", 5), ("P4", 5), ("K13", 3)] {
        s.check(
            &format!("chi S^3_{b}"),
            "values for n >= 3",
            &want.to_string(),
            |_| chi_value(&gen_generalized(3, &base(b))?, budget, want),
        );
    }
    s.check("S^3_K4E needs 8", "chi(S^3_K4E) = 8", "UNSAT", |_| {
        let s3 = gen_generalized(3, &base("K4E"))?;
        decision(
            &union_of(&s3, &["3", "1", "03", "01", "23", "21"])?,
            7,
            &ColorConstraints::none(),
            budget,
        )
    });
    s.check(
        "ST search m=5",
        "chi(ST^n_3) <= 31",
        "CERTIFIED <= 31, tiles to ST^7",
        |_| {
            let mut cfg = SearchConfig::new(Family::Triangle, 5, 31);
            cfg.restarts = 4;
            cfg.seed = 1;
            let out = search_certified_coloring(&cfg)?;
            let Some(b) = out.certified_bound else {
                return Ok((format!("none, penalty {}", out.best_penalty), false));
            };
            let tiled = tile_coloring(&Family::Triangle, 5, &out.best, 7)?;
            let ok = verify_packing_coloring(&gen_triangle(7)?, &tiled)?.ok();
            Ok((
                format!(
                    "CERTIFIED {b}, ST^7 {}",
                    if ok { "valid" } else { "invalid" }
                ),
                b <= 31 && ok,
            ))
        },
    );
}

pub fn run(
    ctx: &Ctx,
    profile: Profile,
    dir: Option<&Path>,
    output: Option<&Path>,
) -> Result<u8, Error> {
    let start = Instant::now();
    let data = DataSet::load(dir)?;
    let mut suite = Suite {
        ctx,
        data: &data,
        records: Vec::new(),
    };
    quick_checks(&mut suite, ctx.timeout);
    if matches!(profile, Profile::Full) {
        full_checks(&mut suite, ctx.timeout);
    }
    let failed = suite.records.iter().filter(|r| !r.pass).count();
    let manifest = RunManifest {
        command: std::env::args().collect(),
        tool_version: env!("CARGO_PKG_VERSION"),
        profile: match profile {
            Profile::Quick => "quick",
            Profile::Full => "full",
        },
        inputs: data.hashes(),
        passed: suite.records.len() - failed,
        failed,
        checks: suite.records,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    ctx.say(&format!(
        "{} passed, {} failed",
        manifest.passed, manifest.failed
    ));
    let text = serde_json::to_string_pretty(&manifest).expect("json");
    if let Some(p) = output {
        fs::write(p, &text)?;
    }
    if ctx.json {
        println!("{text}");
    }
    Ok(if failed == 0 { 0 } else { EXIT_FAIL })
}
