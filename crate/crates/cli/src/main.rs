use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = spinclone_cli::Cli::parse();
    match spinclone_cli::execute(&cli) {
        Ok(path) => println!("{}", path.display()),
        Err(e) => {
            eprintln!("spinclone: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
