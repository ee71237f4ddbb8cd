use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use mindgames_service::SessionStore;

use crate::InstanceSource;

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Finished games are appended here.
    #[arg(long)]
    pub storage_dir: Option<PathBuf>,
    #[command(flatten)]
    pub source: InstanceSource,
}

pub fn run(args: &ServeArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let pool = args.source.load()?;
    let store = Arc::new(SessionStore::new(pool, args.storage_dir.as_deref())?);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(SocketAddr::new(args.host, args.port)).await?;
        writeln!(out, "listening on http://{}", listener.local_addr()?)?;
        out.flush()?;
        mindgames_service::serve(listener, store).await?;
        Ok(())
    })
}
