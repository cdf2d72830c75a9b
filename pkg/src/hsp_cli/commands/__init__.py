"""hsp-cli subcommands."""
