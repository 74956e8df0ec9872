#include <cstdio>

// Placeholder until the CLI layer lands.
int main() {
    std::puts("lpvl1: command-line interface not wired up yet");
    return 1;
}
