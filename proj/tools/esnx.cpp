// esnx command-line interface (subcommands wired up in main_impl below).
#include <cstdio>

int main() {
    std::puts("esnx: CLI not built yet");
    return 2;
}
