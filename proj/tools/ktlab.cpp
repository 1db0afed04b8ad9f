// ktlab command-line interface (placeholder while the library grows).
#include <cstdio>

int main() {
    std::puts("ktlab: not yet wired up");
    return 1;
}
