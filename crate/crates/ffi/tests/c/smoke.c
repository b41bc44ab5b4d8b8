/* Runs a passing and a mutated scenario through the C interface. */
#include <stdio.h>
#include <string.h>
#include "webtaylor.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(void) {
    WtScenario *sc = NULL;
    WtReport *rep = NULL;

    CHECK(wt_scenario_new(&sc) == WT_STATUS_OK);
    CHECK(wt_scenario_set_model(sc, "kothe") == WT_STATUS_OK);
    CHECK(wt_scenario_set_suites(sc, "ll.comonad,taylor.series") == WT_STATUS_OK);
    CHECK(wt_scenario_set_params(sc, 3, 10, 2, 2) == WT_STATUS_OK);
    CHECK(wt_run(sc, &rep) == WT_STATUS_OK);
    CHECK(wt_report_passed(rep) == 1);
    char *json = wt_report_json(rep);
    CHECK(json != NULL && strstr(json, "\"taylor.series\"") != NULL);
    wt_string_free(json);
    wt_report_free(rep);

    CHECK(wt_scenario_set_mutation(sc, "dig") == WT_STATUS_OK);
    CHECK(wt_run(sc, &rep) == WT_STATUS_OK);
    CHECK(wt_report_passed(rep) == 0);
    CHECK(wt_report_failures(rep) > 0);
    wt_report_free(rep);

    CHECK(wt_scenario_set_suites(sc, "nope") == WT_STATUS_UNKNOWN_SUITE);
    CHECK(strstr(wt_last_error(), "nope") != NULL);
    wt_scenario_free(sc);

    printf("c smoke ok (webtaylor %s)\n", wt_version());
    return 0;
}
