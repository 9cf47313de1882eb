fn main() {
    std::process::exit(stokes_fv::cli::main_with_args(std::env::args_os()));
}
