"""adiageo command-line front end."""
