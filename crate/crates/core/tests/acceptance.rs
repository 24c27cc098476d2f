//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

use qbm_core::validation::{run_criterion, Compare};

fn main() {
    // `cargo test -- --list` and friends pass flags; a bare filter picks criteria.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        for n in 1..=8 {
            println!("AC{n}: test");
        }
        return;
    }
    let mut failed = Vec::new();
    for n in 1..=8u8 {
        let id = format!("AC{n}");
        if !args.is_empty() && !args.iter().any(|a| id.contains(a.as_str())) {
            continue;
        }
        let check = run_criterion(n).expect("criterion is registered");
        println!("{}", check.summary_line());
        for m in &check.parts {
            let verdict = if m.passed { "ok  " } else { "FAIL" };
            let value = m.measured.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
            let target = match (m.compare, m.expected) {
                (Compare::Info, _) => "info".to_string(),
                (Compare::Rel, Some(e)) => format!("expected {e:.6e} rel {:.1e}", m.tolerance),
                (Compare::Abs, Some(e)) => format!("expected {e:.6e} abs {:.1e}", m.tolerance),
                (Compare::AtLeast, _) => format!(">= {:.1e}", m.tolerance),
                _ => format!("<= {:.1e}", m.tolerance),
            };
            let note = m.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
            println!("    {verdict} {}: {value} [{target}]{note}", m.name);
        }
        if !check.passed() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
