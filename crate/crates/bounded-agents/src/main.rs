use bounded_agents::cli::main_entry;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(main_entry(argv));
}
