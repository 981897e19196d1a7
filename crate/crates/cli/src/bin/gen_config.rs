//! Regenerates `configs/default.json` from the built-in defaults. Run after
//! changing any preset so the shipped file stays in sync (a test enforces
//! the match).

fn main() {
    let cfg = rebound_cli::ExperimentConfig::default();
    let mut text = serde_json::to_string_pretty(&cfg).unwrap();
    text.push('\n');
    std::fs::write("configs/default.json", text).unwrap();
    println!("wrote configs/default.json");
}
