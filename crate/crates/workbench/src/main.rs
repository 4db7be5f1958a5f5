fn main() {
    std::process::exit(berlu_workbench::cli::main());
}
