mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratnest::branchdecomp::{
    bd_to_tree_decomposition, compose_blocks, extend_over_apex, validate, width,
    BranchDecomposition,
};
use ratnest::fixtures;
use ratnest::genusreduce::{approx_bw_bounded_genus, CertificateKind, GenusOutcome};
use ratnest::graph::{blocks, Graph, VertexId};
use ratnest::gridminer::{find_grid_planar, validate_grid_model};
use ratnest::oracle::{
    exact_bw, exact_bw_bruteforce, exhaustive_representativity, generate, near_embedding,
    planted_grid, random_planar, Instance, Kind, OracleMode,
};
use ratnest::pipeline::{pipeline, serialize_near_embedding, AdhesionKind, PipelineOutcome};
use ratnest::ratcatcher::{
    decide_planar_bw, has_inner_bridge, planar_branchwidth, sphere_cut_decomposition,
    validate_sphere_cut,
};
use ratnest::surface::{serialize_embedding, EmbeddedGraph};
use ratnest::vortex::{attach_vortices, normalize_vortex_boundary, serialize_rendition};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn within(t: Instant, budget: Duration) -> bool {
    t.elapsed() <= budget
}

/// Connected planar graphs with m <= 9 up to isomorphism, plus 200 seeded
/// random planar graphs with m <= 10, each with its oracle branchwidth.
fn oracle_corpus() -> Vec<(EmbeddedGraph, ratnest::oracle::OracleResult)> {
    let mut corpus = common::planar_corpus(9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let cap = (3 * n).saturating_sub(6).max(n - 1).min(10);
        let m = rng.gen_range(n - 1..=cap);
        corpus.push(random_planar(n, m, seed));
    }
    corpus
        .into_iter()
        .map(|e| {
            let oracle = exact_bw_bruteforce(e.graph()).expect("m <= 12");
            (e, oracle)
        })
        .collect()
}

fn criterion_1(corpus: &[(EmbeddedGraph, ratnest::oracle::OracleResult)], t: Instant) -> Verdict {
    let mut disagreements = 0;
    for (e, oracle) in corpus {
        let b = oracle.exact_bw;
        for k in 1..=b + 1 {
            if decide_planar_bw(e, k).expect("planar input") != (b <= k) {
                disagreements += 1;
            }
        }
    }
    verdict(
        disagreements == 0 && within(t, Duration::from_secs(600)),
        format!(
            "{} graphs, {disagreements} disagreements, {:.1?}",
            corpus.len(),
            t.elapsed()
        ),
    )
}

struct SphereCutReport {
    verdict: Verdict,
    widths_match: bool,
    failures_have_inner_bridge: bool,
}

fn criterion_2(corpus: &[(EmbeddedGraph, ratnest::oracle::OracleResult)]) -> SphereCutReport {
    let mut wrong_width = 0;
    let mut invalid = 0;
    let mut unexplained = 0;
    for (e, oracle) in corpus {
        let scd = sphere_cut_decomposition(e).expect("planar input");
        if width(&scd.bd, e.graph()).unwrap() != oracle.exact_bw {
            wrong_width += 1;
        }
        if validate_sphere_cut(&scd, e).is_err() {
            invalid += 1;
            if !has_inner_bridge(e.graph()) {
                unexplained += 1;
            }
        }
    }
    SphereCutReport {
        verdict: verdict(
            wrong_width == 0 && invalid == 0,
            format!(
                "{} graphs, {wrong_width} width mismatches, {invalid} without a valid sphere-cut \
                 decomposition ({unexplained} of them bridge-free)",
                corpus.len()
            ),
        ),
        widths_match: wrong_width == 0,
        failures_have_inner_bridge: unexplained == 0,
    }
}

/// Torus or Klein-bottle grid, or a planar graph, with a random tenth of
/// the edges removed.
fn bounded_genus_instance(seed: u64) -> EmbeddedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = match seed % 3 {
        0 => fixtures::torus_grid(rng.gen_range(3..=10)),
        1 => fixtures::klein_grid(rng.gen_range(3..=10)),
        _ => {
            let n = rng.gen_range(10..=60);
            random_planar(n, 2 * n, seed)
        }
    };
    let keep: Vec<usize> = base
        .graph()
        .edge_ids()
        .filter(|_| rng.gen_bool(0.9))
        .collect();
    base.edge_induced(&keep).expect("edge subset").0
}

fn certificate_replays(cert: &ratnest::genusreduce::LowerBoundCertificate) -> bool {
    let emb = &cert.witness.embedding;
    match cert.kind {
        CertificateKind::Representativity if emb.graph().n() + emb.faces().len() <= 30 => {
            matches!(exhaustive_representativity(emb), Ok(Some(rep)) if rep >= cert.value)
        }
        _ => cert.replay().is_ok(),
    }
}

fn criterion_3(t: Instant) -> Verdict {
    let mut instances: Vec<EmbeddedGraph> = (3..=6)
        .flat_map(|r| [fixtures::torus_grid(r), fixtures::klein_grid(r)])
        .collect();
    instances.extend((0..100).map(bounded_genus_instance));
    let (mut decompositions, mut certificates, mut violations) = (0, 0, Vec::new());
    for (i, e) in instances.iter().enumerate() {
        assert!(e.genus() <= 2 && e.graph().n() <= 200);
        for k in 2..=6 {
            match approx_bw_bounded_genus(e, k).expect("valid input") {
                GenusOutcome::Decomposition(d) => {
                    decompositions += 1;
                    let w = width(&d.bd, e.graph()).unwrap();
                    let bound = e.genus() * (k - 1) + k;
                    if validate(&d.bd, e.graph()).is_err() || w > bound {
                        violations.push(format!("instance {i} k {k}: width {w} bound {bound}"));
                    }
                }
                GenusOutcome::LowerBound(c) => {
                    certificates += 1;
                    if c.value != k || !certificate_replays(&c) {
                        violations.push(format!("instance {i} k {k}: certificate does not replay"));
                    }
                }
            }
        }
    }
    verdict(
        violations.is_empty() && within(t, Duration::from_secs(300)),
        format!(
            "{} instances, {decompositions} decompositions, {certificates} certificates, {} violations{}, {:.1?}",
            instances.len(),
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default(),
            t.elapsed()
        ),
    )
}

fn criterion_4(t: Instant) -> Verdict {
    let mut violations = Vec::new();
    let mut oracle_checked = 0;
    for seed in 0..100 {
        let Instance::Vortex(inst) = generate(Kind::PlantedVortex, seed).unwrap() else {
            unreachable!()
        };
        let ground = &inst.rendition.ground;
        let mut stripped = planar_branchwidth(ground).unwrap();
        if ground.graph().m() <= 12 {
            oracle_checked += 1;
            stripped = exact_bw_bruteforce(ground.graph()).unwrap().exact_bw;
        }
        let normalized = normalize_vortex_boundary(&inst.rendition).unwrap();
        let bd = attach_vortices(&normalized).unwrap();
        let full = normalized.full_graph().unwrap().graph;
        let w = width(&bd, &full).unwrap();
        let bound = stripped + 2 * inst.width * inst.breadth + 6 * inst.breadth;
        if validate(&bd, &full).is_err() || w > bound {
            violations.push(format!("seed {seed}: width {w} bound {bound}"));
        }
    }
    verdict(
        violations.is_empty() && within(t, Duration::from_secs(300)),
        format!(
            "100 instances ({oracle_checked} with oracle ground width), {} violations{}, {:.1?}",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default(),
            t.elapsed()
        ),
    )
}

fn random_connected(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Graph {
    let n = rng.gen_range(3..=max_n);
    let mut g = Graph::new(n).unwrap();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v).unwrap();
    }
    let extra = rng.gen_range(0..=max_m.saturating_sub(n - 1));
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && g.edge_between(u, v).is_none() {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

/// Optimal decomposition of the edge subset `edges` of `g`, labelled by
/// edge ids of `g`.
fn optimal_part(g: &Graph, edges: &[usize]) -> (usize, BranchDecomposition) {
    if edges.len() == 1 {
        return (0, BranchDecomposition::single(edges[0]));
    }
    let sub = g.edge_subgraph(edges).unwrap();
    let res = exact_bw(&sub.graph, OracleMode::BranchAndBound).unwrap();
    (res.exact_bw, res.optimal_bd.relabel(&sub.edge_map))
}

struct Criterion5 {
    verdict: Verdict,
    compose_bad: usize,
    /// Apex violations where some block decomposition has width >= 2.
    apex_wide_bad: usize,
    /// Apex violations exceeding `max(input, 2) + |x|`.
    apex_beyond_floor: usize,
}

fn criterion_5(t: Instant) -> Criterion5 {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compose_checked = 0;
    let mut compose_bad = 0;
    while compose_checked < 200 {
        let g = random_connected(&mut rng, 10, 14);
        let forest = blocks(&g);
        if forest.blocks.len() < 2 {
            continue;
        }
        let parts: Vec<(Vec<VertexId>, BranchDecomposition, usize)> = forest
            .blocks
            .iter()
            .zip(&forest.block_edges)
            .map(|(vs, es)| {
                let (w, bd) = optimal_part(&g, es);
                (vs.clone(), bd, w)
            })
            .collect();
        let max = parts.iter().map(|p| p.2).max().unwrap();
        if max < 2 {
            continue;
        }
        let per_block: Vec<(Vec<VertexId>, BranchDecomposition)> =
            parts.into_iter().map(|(vs, bd, _)| (vs, bd)).collect();
        let out = compose_blocks(&g, &per_block).unwrap();
        compose_checked += 1;
        if validate(&out, &g).is_err() || width(&out, &g).unwrap() != max {
            compose_bad += 1;
        }
    }
    let mut apex_checked = 0;
    let mut apex_bad = 0;
    let mut apex_wide_bad = 0;
    let mut apex_beyond_floor = 0;
    let mut apex_impossible = 0;
    while apex_checked < 200 {
        let g = random_connected(&mut rng, 10, 16);
        let x: BTreeSet<VertexId> = (0..rng.gen_range(0..=3))
            .map(|_| rng.gen_range(0..g.n()))
            .collect();
        let keep: Vec<VertexId> = g.vertices().filter(|v| !x.contains(v)).collect();
        if keep.is_empty() {
            continue;
        }
        let rest = g.induced(&keep).unwrap();
        if rest.graph.m() == 0 {
            continue;
        }
        let forest = blocks(&rest.graph);
        let mut max = 0;
        let per_block: Vec<BranchDecomposition> = forest
            .block_edges
            .iter()
            .map(|es| {
                let (w, bd) = optimal_part(&rest.graph, es);
                max = max.max(w);
                bd.relabel(&rest.edge_map)
            })
            .collect();
        let out = extend_over_apex(&g, &x, &per_block).unwrap();
        apex_checked += 1;
        if validate(&out, &g).is_err() {
            apex_bad += 1;
            apex_wide_bad += 1;
            apex_beyond_floor += 1;
            continue;
        }
        let w = width(&out, &g).unwrap();
        if w > max + x.len() {
            apex_bad += 1;
            if max >= 2 {
                apex_wide_bad += 1;
            }
            if w > max.max(2) + x.len() {
                apex_beyond_floor += 1;
            }
            let best = exact_bw(&g, OracleMode::BranchAndBound).unwrap().exact_bw;
            if best > max + x.len() {
                apex_impossible += 1;
            }
        }
    }
    let verdict = verdict(
        compose_bad == 0 && apex_bad == 0 && within(t, Duration::from_secs(60)),
        format!(
            "compose_blocks {compose_checked} instances ({compose_bad} bad), extend_over_apex \
             {apex_checked} instances ({apex_bad} bad: {apex_wide_bad} with block width >= 2, \
             {apex_impossible} where bw(g) itself exceeds the bound, {apex_beyond_floor} above \
             max(width, 2) + |x|), {:.1?}",
            t.elapsed()
        ),
    );
    Criterion5 {
        verdict,
        compose_bad,
        apex_wide_bad,
        apex_beyond_floor,
    }
}

/// The instance with one hint replaced by a wrong kind, if any adhesion
/// rules that kind out.
fn misclassified(seed: u64) -> Option<ratnest::pipeline::NearEmbeddingInput> {
    let inst = near_embedding(seed).unwrap();
    let mut input = inst.input.clone();
    for t in 0..input.bags.len() {
        for i in 0..input.bags[t].adhesions.len() {
            let adh = input.bags[t].adhesions[i].clone();
            let cases = input.adhesion_cases(t, &adh.vertices);
            let wrong = [
                AdhesionKind::Apex,
                AdhesionKind::VortexBag,
                AdhesionKind::SmallCell,
            ]
            .into_iter()
            .find(|k| !cases.contains(k));
            if let Some(kind) = wrong {
                input.bags[t].adhesions[i].hint = Some(kind);
                return Some(input);
            }
        }
    }
    None
}

/// The instance with an adhesion widened by two far-apart ground vertices
/// of the parent, matching no case.
fn unclassifiable(seed: u64) -> Option<ratnest::pipeline::NearEmbeddingInput> {
    let inst = near_embedding(seed).unwrap();
    let mut input = inst.input;
    let (parent, child) = input.tree[0];
    let map = input.bags[parent].map.clone();
    let (a, b) = (map[0], map[map.len() / 2]);
    for v in [a, b] {
        input.bags[child].vertices.insert(v);
        input.bags[child].apex.insert(v);
    }
    let vertices = input.adhesion(parent, child);
    let adh = input.bags[parent]
        .adhesions
        .iter_mut()
        .find(|x| x.child == child)?;
    adh.vertices = vertices;
    adh.hint = None;
    Some(input)
}

fn criterion_6(t: Instant) -> Verdict {
    let mut violations = Vec::new();
    let mut certified = 0;
    for seed in 0..50 {
        let input = near_embedding(seed).unwrap().input;
        let mut k = 1;
        loop {
            match pipeline(&input, k) {
                Ok(PipelineOutcome::Decomposition { bd, ledger }) => {
                    let w = width(&bd, &input.graph).unwrap();
                    if validate(&bd, &input.graph).is_err()
                        || w > ledger.bound()
                        || w != ledger.width
                    {
                        violations.push(format!(
                            "seed {seed} k {k}: width {w} bound {}",
                            ledger.bound()
                        ));
                    }
                    break;
                }
                Ok(PipelineOutcome::LowerBound { .. }) => certified += 1,
                Err(ratnest::Error::Contract(_)) => {}
                Err(e) => {
                    violations.push(format!("seed {seed} k {k}: {e}"));
                    break;
                }
            }
            k += 1;
        }
    }
    let mut fixtures_run = 0;
    let mut accepted = 0;
    for seed in 0..50 {
        for bad in [misclassified(seed), unclassifiable(seed)]
            .into_iter()
            .flatten()
        {
            fixtures_run += 1;
            if bad.validate().is_ok() || pipeline(&bad, 8).is_ok() {
                accepted += 1;
            }
        }
    }
    verdict(
        violations.is_empty()
            && accepted == 0
            && fixtures_run > 0
            && within(t, Duration::from_secs(300)),
        format!(
            "50 instances, {certified} certified k below the final one, {} violations{}; \
             {fixtures_run} misclassification fixtures, {accepted} accepted, {:.1?}",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default(),
            t.elapsed()
        ),
    )
}

fn criterion_7(t: Instant) -> Verdict {
    let mut hosts: Vec<(EmbeddedGraph, usize)> =
        (2..=6).map(|r| (fixtures::grid(r, r), r)).collect();
    for r in 2..=6 {
        for seed in 0..10 {
            let inst = planted_grid(r, seed);
            hosts.push((inst.host, r));
        }
    }
    let mut failures = 0;
    for (host, r) in &hosts {
        match find_grid_planar(host, *r).unwrap() {
            Some(m) if m.r == *r && validate_grid_model(&m, host.graph()).is_ok() => {}
            _ => failures += 1,
        }
    }
    verdict(
        failures == 0 && within(t, Duration::from_secs(120)),
        format!(
            "{} hosts, {failures} failures, {:.1?}",
            hosts.len(),
            t.elapsed()
        ),
    )
}

fn criterion_8(corpus: &[(EmbeddedGraph, ratnest::oracle::OracleResult)]) -> Verdict {
    let mut checked = 0;
    let mut bad = 0;
    for (e, oracle) in corpus {
        let g = e.graph();
        if g.m() + g.components().len() == g.n() {
            continue;
        }
        checked += 1;
        let td = bd_to_tree_decomposition(&oracle.optimal_bd, g).unwrap();
        let cap = (3 * oracle.exact_bw / 2).saturating_sub(1);
        if td.validate(g).is_err() || td.width() > cap {
            bad += 1;
        }
    }
    verdict(
        bad == 0,
        format!("{checked} cyclic oracle-solved graphs, {bad} violations"),
    )
}

fn run_cli(
    args: &[&str],
    threads: Option<&str>,
    out: Option<&Path>,
) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ratnest"));
    cmd.args(args);
    if let Some(path) = out {
        cmd.arg("-o").arg(path);
    }
    match threads {
        Some(t) => cmd.env("RATNEST_THREADS", t),
        None => cmd.env_remove("RATNEST_THREADS"),
    };
    let o = cmd.output().expect("binary runs");
    let artifact = out
        .map(|p| std::fs::read(p).unwrap_or_default())
        .unwrap_or_default();
    (o.status.code(), o.stdout, artifact)
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: String| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let planar = write("planar.emb", serialize_embedding(&fixtures::grid(3, 4)));
    let torus = write("torus.emb", serialize_embedding(&fixtures::torus_grid(4)));
    let Instance::Vortex(v) = generate(Kind::PlantedVortex, 7).unwrap() else {
        unreachable!()
    };
    let rendition = write("vortex.txt", serialize_rendition(&v.rendition));
    let ne = write(
        "ne.txt",
        serialize_near_embedding(&near_embedding(1).unwrap().input),
    );
    let small_ne = write(
        "ne-small.txt",
        serialize_near_embedding(&near_embedding(24).unwrap().input),
    );
    let decomposition = dir.path().join("d.bd");
    let (_, _, bd_text) = run_cli(&["scd", &planar], None, Some(&decomposition));
    let bd = write("planar.scd", String::from_utf8(bd_text).unwrap());

    let mut commands: Vec<Vec<String>> = vec![
        vec!["bw-planar".into(), "--k".into(), "3".into(), planar.clone()],
        vec!["bw-planar".into(), "--k".into(), "2".into(), planar.clone()],
        vec!["scd".into(), planar.clone()],
        vec![
            "genus-approx".into(),
            "--k".into(),
            "3".into(),
            torus.clone(),
        ],
        vec![
            "genus-approx".into(),
            "--k".into(),
            "5".into(),
            torus.clone(),
        ],
        vec!["vortex-attach".into(), rendition],
        vec!["pipeline".into(), "--k".into(), "8".into(), ne.clone()],
        vec!["pipeline".into(), "--k".into(), "2".into(), ne.clone()],
        vec!["eptas".into(), "--epsilon".into(), "0.5".into(), ne],
        vec!["eptas".into(), "--epsilon".into(), "0.1".into(), small_ne],
        vec!["validate".into(), planar.clone(), bd],
        vec!["oracle".into(), "bw".into(), planar.clone()],
        vec!["oracle".into(), "rep".into(), torus],
    ];
    for kind in Kind::ALL {
        commands.push(vec!["gen".into(), kind.name().into(), "3".into()]);
    }
    let mut differing = Vec::new();
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = dir.path().join("artifact");
        let runs: Vec<_> = [None, None, Some("1"), Some("4")]
            .into_iter()
            .map(|t| run_cli(&args, t, Some(&out)))
            .collect();
        if runs.iter().any(|r| r != &runs[0]) {
            differing.push(args[0].to_string());
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} invocations x 4 runs (threads unset, unset, 1, 4), differing: {:?}",
            commands.len(),
            differing
        ),
    )
}

fn main() {
    let mut lines = Vec::new();
    let mut report = |n: usize, v: &Verdict| {
        let line = format!(
            "criterion {n}: {} - {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        println!("{line}");
        lines.push((n, v.pass));
    };

    let t = Instant::now();
    let corpus = oracle_corpus();
    let c1 = criterion_1(&corpus, t);
    report(1, &c1);
    let c2 = criterion_2(&corpus);
    report(2, &c2.verdict);
    let c3 = criterion_3(Instant::now());
    report(3, &c3);
    let c4 = criterion_4(Instant::now());
    report(4, &c4);
    let c5 = criterion_5(Instant::now());
    report(5, &c5.verdict);
    let c6 = criterion_6(Instant::now());
    report(6, &c6);
    let c7 = criterion_7(Instant::now());
    report(7, &c7);
    let c8 = criterion_8(&corpus);
    report(8, &c8);
    let c9 = criterion_9();
    report(9, &c9);

    // Criterion 2 is unattainable as stated: graphs with a bridge between
    // two non-pendant vertices admit no sphere-cut decomposition. Its
    // attainable parts are still required.
    assert!(c2.widths_match, "sphere-cut widths differ from the oracle");
    assert!(
        c2.failures_have_inner_bridge,
        "a bridge-free graph lacks a valid sphere-cut decomposition"
    );
    // Criterion 5 is unattainable as stated for inputs whose blocks all
    // have width below 2: a star plus one apex can be K4. The law must hold
    // whenever some block has width >= 2, and with the width floored at 2
    // otherwise.
    assert_eq!(c5.compose_bad, 0, "compose_blocks broke the maximum law");
    assert_eq!(c5.apex_wide_bad, 0, "extend_over_apex broke the apex law");
    assert_eq!(
        c5.apex_beyond_floor, 0,
        "extend_over_apex exceeded max(width, 2) + |x|"
    );
    let failed: Vec<usize> = lines
        .iter()
        .filter(|&&(n, pass)| !pass && n != 2 && n != 5)
        .map(|&(n, _)| n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
