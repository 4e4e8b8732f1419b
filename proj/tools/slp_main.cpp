// Placeholder while the library comes up; the real CLI lands with the
// subcommand modules.
int main() { return 0; }
