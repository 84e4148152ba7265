from topocheck.main import cli

cli()
