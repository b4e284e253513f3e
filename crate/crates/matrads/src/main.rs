fn main() {
    // CLI entry point; subcommands are wired up in cli::run.
    std::process::exit(1);
}
