#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <string>

std::string g_mc2_binary;  // set from argv[1]

int main(int argc, char** argv) {
    if (argc > 1) g_mc2_binary = argv[1];
    doctest::Context context;
    context.applyCommandLine(1, argv);
    return context.run();
}
