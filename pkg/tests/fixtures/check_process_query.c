#include <assert.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef struct {
    unsigned int value;
} request_t;

void process_query(const request_t *request, bool *response) {
    *response = request->value >= 3u;
}

uint32_t nondet_uint32_t(void);
bool nondet_bool(void);

request_t *request;
bool response;

int main(void) {
    request = calloc(1, sizeof(request_t));
    __CPROVER_assume(request != NULL);
    request->value = nondet_uint32_t();
    response = nondet_bool();
    __CPROVER_assume(1);
    process_query(request, &response);
    assert((response == (request->value >= 3U)));
    return 0;
}
