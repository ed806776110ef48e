use super::IterationRecord;

/// Column order of the CSV history.
pub const CSV_HEADER: [&str; 11] = [
    "k",
    "sigma",
    "kkt_res",
    "primal_infeas",
    "complementarity",
    "objective",
    "e_norm",
    "thrA",
    "thrB",
    "inner_iters",
    "dist_y_star",
];

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// One row per outer iteration; `dist_y_star` is empty without an oracle.
pub fn history_csv(history: &[IterationRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for r in history {
        w.write_record([
            r.k.to_string(),
            num(r.sigma),
            num(r.kkt_res),
            num(r.primal_infeas),
            num(r.complementarity),
            num(r.objective),
            num(r.e_norm),
            num(r.thr_a),
            num(r.thr_b),
            r.inner_iters.to_string(),
            r.dist_y_star.map(num).unwrap_or_default(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

/// The full records as a JSON array.
pub fn history_json(history: &[IterationRecord]) -> String {
    serde_json::to_string_pretty(history).expect("records serialize")
}
