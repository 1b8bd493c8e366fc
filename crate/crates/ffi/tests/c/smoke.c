#include <math.h>
#include <stdio.h>
#include <string.h>

#include "screenlab.h"

#define CHECK(cond)                                                     \
    do {                                                                \
        if (!(cond)) {                                                  \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    double scores[3] = {0.7, 0.6, 0.8};
    uint8_t prot[3] = {0, 1, 1};
    uint32_t order[3] = {0, 1, 2};
    uint32_t ids[2];
    size_t len = 0, evaluated = 0;

    CHECK(screenlab_select(scores, prot, order, 3, 2, 0.5, 0.5, SCREENLAB_PROBLEM_BEST,
                           SCREENLAB_FATIGUE_NONE, 0, ids, &len, &evaluated) == SCREENLAB_STATUS_OK);
    CHECK(len == 2 && ids[0] == 0 && ids[1] == 2 && evaluated == 3);

    CHECK(screenlab_select(scores, prot, order, 3, 2, 0.5, 0.5, SCREENLAB_PROBLEM_GOOD,
                           SCREENLAB_FATIGUE_NONE, 0, ids, &len, &evaluated) == SCREENLAB_STATUS_OK);
    CHECK(len == 2 && ids[0] == 0 && ids[1] == 1 && evaluated == 2);

    ScreenlabConfig *cfg = NULL;
    CHECK(screenlab_config_from_json("{\"k\": 900}", &cfg) == SCREENLAB_STATUS_CONFIG_ERROR);
    CHECK(cfg == NULL);
    CHECK(strlen(screenlab_last_error_message()) > 0);

    CHECK(screenlab_config_from_json("{\"runs\": 50, \"sweep\": \"psi=0,1\"}", &cfg) == SCREENLAB_STATUS_OK);
    ScreenlabResult *res = NULL;
    CHECK(screenlab_run_sweep(cfg, 2, &res) == SCREENLAB_STATUS_OK);
    size_t rows = 0;
    CHECK(screenlab_result_row_count(res, &rows) == SCREENLAB_STATUS_OK && rows == 2);
    ScreenlabRow row;
    CHECK(screenlab_result_row(res, 0, &row) == SCREENLAB_STATUS_OK);
    CHECK(row.runs_total == 50 && row.mean_rtb > 0.0 && row.mean_rtb <= 1.0);
    CHECK(screenlab_result_row(res, 1, &row) == SCREENLAB_STATUS_OK);
    CHECK(row.runs_feasible == 0 && isnan(row.mean_rtb));
    CHECK(screenlab_result_row(res, 2, &row) == SCREENLAB_STATUS_INVALID_ARGUMENT);

    char *csv = NULL;
    CHECK(screenlab_result_to_csv(res, &csv) == SCREENLAB_STATUS_OK);
    CHECK(strncmp(csv, "config_id,", 10) == 0);
    printf("%s", csv);
    screenlab_string_free(csv);
    screenlab_result_free(res);
    screenlab_config_free(cfg);
    return 0;
}
