"""Bank credit cycle nodes."""
