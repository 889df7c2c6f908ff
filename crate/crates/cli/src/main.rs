fn main() {
    let (code, out) = sbo_cli::run(std::env::args_os());
    println!("{out}");
    std::process::exit(code);
}
