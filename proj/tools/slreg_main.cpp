#include <cstdio>

int main() {
    std::puts("slreg: command-line interface under construction");
    return 2;
}
