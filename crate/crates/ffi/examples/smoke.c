/* Loads a rule file given on the command line and transduces one tree. */
#include <stdio.h>
#include <stdlib.h>

#include "xtt.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    if (fread(buf, 1, n, f) != (size_t)n) { fclose(f); free(buf); return NULL; }
    buf[n] = '\0';
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: %s RULES TREE\n", argv[0]);
        return 1;
    }
    char *yaml = slurp(argv[1]);
    if (!yaml) { perror(argv[1]); return 1; }

    XttTransducer *t = NULL;
    if (xtt_transducer_load(yaml, &t) != XTT_STATUS_OK) {
        fprintf(stderr, "error: %s\n", xtt_last_error_message());
        free(yaml);
        return 1;
    }
    free(yaml);

    XttResult *r = NULL;
    if (xtt_transduce(t, argv[2], 0, 0, &r) != XTT_STATUS_OK) {
        fprintf(stderr, "error: %s\n", xtt_last_error_message());
        xtt_transducer_free(t);
        return 1;
    }
    for (size_t i = 0; i < xtt_result_output_count(r); i++) {
        double w;
        char *tree;
        xtt_result_weight(r, i, &w);
        xtt_result_tree(r, i, &tree);
        printf("%.6f\t%s\n", w, tree);
        xtt_string_free(tree);
    }
    printf("outputs=%zu stuck=%zu truncated=%s\n", xtt_result_output_count(r),
           xtt_result_stuck_count(r), xtt_result_truncated(r) ? "true" : "false");
    xtt_result_free(r);
    xtt_transducer_free(t);
    return 0;
}
