use clap::Parser;

fn main() {
    let cli = puc_cli::Cli::parse();
    match puc_cli::run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("puc: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
